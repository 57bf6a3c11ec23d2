#include "core/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace medroute {

namespace {

std::string fmt4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

}  // namespace

long ConfusionMatrix::total() const {
  long n = 0;
  for (const auto& row : counts)
    n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

long ConfusionMatrix::trace() const {
  long n = 0;
  for (int i = 0; i < n_classes; ++i) n += counts[size_t(i)][size_t(i)];
  return n;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& golds,
                                 const std::vector<int>& preds,
                                 int n_classes) {
  require(golds.size() == preds.size(), ErrorKind::InvalidArgument,
          "golds/preds length mismatch");
  ConfusionMatrix cm;
  cm.n_classes = n_classes;
  cm.counts.assign(size_t(n_classes), std::vector<long>(size_t(n_classes), 0));
  for (size_t i = 0; i < golds.size(); ++i) {
    int g = golds[i], p = preds[i];
    require(g >= 0 && g < n_classes && p >= 0 && p < n_classes,
            ErrorKind::InvalidArgument, "class id out of range");
    ++cm.counts[size_t(g)][size_t(p)];
  }
  return cm;
}

std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& cm) {
  std::vector<ClassMetrics> out(size_t(cm.n_classes));
  for (int c = 0; c < cm.n_classes; ++c) {
    long tp = cm.counts[size_t(c)][size_t(c)];
    long row_sum = 0, col_sum = 0;
    for (int j = 0; j < cm.n_classes; ++j) {
      row_sum += cm.counts[size_t(c)][size_t(j)];
      col_sum += cm.counts[size_t(j)][size_t(c)];
    }
    ClassMetrics& m = out[size_t(c)];
    m.support = row_sum;
    m.precision = col_sum > 0 ? double(tp) / double(col_sum) : 0.0;
    m.recall = row_sum > 0 ? double(tp) / double(row_sum) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }
  return out;
}

EvalReport aggregate_metrics(const std::vector<ClassMetrics>& per_class,
                             const ConfusionMatrix& cm) {
  require(int(per_class.size()) == cm.n_classes, ErrorKind::InvalidArgument,
          "per-class metrics incomplete");
  EvalReport r;
  r.per_class = per_class;
  r.n_examples = cm.total();
  require(r.n_examples > 0, ErrorKind::InvalidArgument,
          "cannot aggregate metrics over zero examples");
  double c = double(per_class.size());
  for (const auto& m : per_class) {
    r.macro_precision += m.precision / c;
    r.macro_recall += m.recall / c;
    r.macro_f1 += m.f1 / c;
    double w = double(m.support) / double(r.n_examples);
    r.weighted_precision += w * m.precision;
    r.weighted_recall += w * m.recall;
    r.weighted_f1 += w * m.f1;
  }
  r.accuracy = double(cm.trace()) / double(r.n_examples);
  return r;
}

std::string report_to_json(const EvalReport& report,
                           const std::vector<std::string>& labels) {
  nlohmann::json j;
  j["n_examples"] = report.n_examples;
  j["accuracy"] = report.accuracy;
  j["macro"] = {{"precision", report.macro_precision},
                {"recall", report.macro_recall},
                {"f1", report.macro_f1}};
  j["weighted"] = {{"precision", report.weighted_precision},
                   {"recall", report.weighted_recall},
                   {"f1", report.weighted_f1}};
  j["classes"] = nlohmann::json::array();
  for (size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    j["classes"].push_back({{"label", labels[c]},
                            {"precision", m.precision},
                            {"recall", m.recall},
                            {"f1", m.f1},
                            {"support", m.support}});
  }
  return j.dump(2);
}

void emit_report(const EvalReport& report, const ConfusionMatrix& cm,
                 const std::vector<std::string>& labels,
                 const std::string& path_prefix) {
  require(!labels.empty() && int(labels.size()) == cm.n_classes,
          ErrorKind::InvalidArgument, "label list does not match classes");

  auto open = [&](const std::string& name) {
    std::ofstream f(path_prefix + name, std::ios::binary);
    require(f.good(), ErrorKind::Io,
            "cannot open for writing: " + path_prefix + name);
    return f;
  };

  {
    auto f = open("report.json");
    f << report_to_json(report, labels) << "\n";
  }
  {
    auto f = open("report.csv");
    f << "class,precision,recall,f1,support\n";
    for (size_t c = 0; c < labels.size(); ++c) {
      const auto& m = report.per_class[c];
      f << csv::format_row({labels[c], fmt4(m.precision), fmt4(m.recall),
                            fmt4(m.f1), std::to_string(m.support)});
    }
    f << csv::format_row({"macro avg", fmt4(report.macro_precision),
                          fmt4(report.macro_recall), fmt4(report.macro_f1),
                          std::to_string(report.n_examples)});
    f << csv::format_row({"weighted avg", fmt4(report.weighted_precision),
                          fmt4(report.weighted_recall),
                          fmt4(report.weighted_f1),
                          std::to_string(report.n_examples)});
    f << csv::format_row({"accuracy", fmt4(report.accuracy), "", "",
                          std::to_string(report.n_examples)});
  }
  {
    auto f = open("confusion.csv");
    std::vector<std::string> header = {"gold\\pred"};
    header.insert(header.end(), labels.begin(), labels.end());
    f << csv::format_row(header);
    for (size_t g = 0; g < labels.size(); ++g) {
      std::vector<std::string> row = {labels[g]};
      for (size_t p = 0; p < labels.size(); ++p)
        row.push_back(std::to_string(cm.counts[g][p]));
      f << csv::format_row(row);
    }
  }
}

}  // namespace medroute
