#pragma once

#include <string>
#include <vector>

namespace medroute {

// Rows = gold class, columns = predicted class, label order = codec order.
struct ConfusionMatrix {
  int n_classes = 0;
  std::vector<std::vector<long>> counts;

  long total() const;
  long trace() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

struct EvalReport {
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
  double accuracy = 0.0;
  long n_examples = 0;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& golds,
                                 const std::vector<int>& preds,
                                 int n_classes);

// Zero-division convention: P = R = F1 = 0 when the denominator is 0.
std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& cm);

// Macro = unweighted mean over all classes including zero-support ones;
// weighted = support-weighted mean.
EvalReport aggregate_metrics(const std::vector<ClassMetrics>& per_class,
                             const ConfusionMatrix& cm);

// Writes <prefix>report.json, <prefix>report.csv and <prefix>confusion.csv
// with 4-decimal formatting.
void emit_report(const EvalReport& report, const ConfusionMatrix& cm,
                 const std::vector<std::string>& labels,
                 const std::string& path_prefix);

std::string report_to_json(const EvalReport& report,
                           const std::vector<std::string>& labels);

}  // namespace medroute
