#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/metrics.hpp"
#include "core/split.hpp"
#include "support/synthetic.hpp"

using namespace medroute;
namespace ts = medroute::testsupport;
namespace fs = std::filesystem;

namespace {

// golds [0,0,1,1,2], preds [0,0,0,1,2]
ConfusionMatrix fixture_cm() {
  return confusion_matrix({0, 0, 1, 1, 2}, {0, 0, 0, 1, 2}, 3);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("medroute_metrics_" + std::to_string(uint64_t(::getpid())) + "_" +
            std::to_string(uint64_t(std::rand())));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ModelConfig eval_model() {
  ModelConfig cfg;
  cfg.max_len = 24;
  cfg.d_model = 16;
  cfg.n_heads = 2;
  cfg.n_layers = 1;
  cfg.d_ff = 32;
  cfg.seed = 9;
  return cfg;
}

TrainConfig eval_train() {
  TrainConfig cfg;
  cfg.peak_lr = 3e-3;
  cfg.batch_size = 16;
  cfg.epochs = 2;
  cfg.seed = 4;
  return cfg;
}

}  // namespace

TEST_CASE("confusion matrix counts gold rows and predicted columns") {
  ConfusionMatrix cm = fixture_cm();
  CHECK(cm.counts[0] == std::vector<long>{2, 0, 0});
  CHECK(cm.counts[1] == std::vector<long>{1, 1, 0});
  CHECK(cm.counts[2] == std::vector<long>{0, 0, 1});
  CHECK(cm.total() == 5);
  CHECK(cm.trace() == 4);
}

TEST_CASE("per-class metrics match hand computation") {
  auto m = class_metrics(fixture_cm());
  REQUIRE(m.size() == 3);
  CHECK(m[0].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m[0].recall == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m[0].f1 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(m[0].support == 2);
  CHECK(m[1].precision == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m[1].recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m[1].f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m[2].f1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("aggregates match hand computation") {
  ConfusionMatrix cm = fixture_cm();
  EvalReport rep = aggregate_metrics(class_metrics(cm), cm);
  CHECK(rep.accuracy == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(rep.macro_f1 ==
        doctest::Approx((0.8 + 2.0 / 3.0 + 1.0) / 3.0).epsilon(1e-12));
  CHECK(rep.weighted_f1 ==
        doctest::Approx((2 * 0.8 + 2 * (2.0 / 3.0) + 1.0) / 5.0)
            .epsilon(1e-12));
  CHECK(rep.n_examples == 5);
}

TEST_CASE("zero-support and zero-prediction classes score zero") {
  // class 2 never appears in gold or predictions
  ConfusionMatrix cm = confusion_matrix({0, 1}, {1, 0}, 3);
  auto m = class_metrics(cm);
  CHECK(m[2].precision == 0.0);
  CHECK(m[2].recall == 0.0);
  CHECK(m[2].f1 == 0.0);
  CHECK(m[2].support == 0);
  EvalReport rep = aggregate_metrics(m, cm);
  CHECK(rep.macro_f1 == 0.0);  // averaged over all three classes
  CHECK(rep.accuracy == 0.0);
}

TEST_CASE("perfect predictions give all ones") {
  ConfusionMatrix cm = confusion_matrix({0, 1, 2}, {0, 1, 2}, 3);
  EvalReport rep = aggregate_metrics(class_metrics(cm), cm);
  CHECK(rep.accuracy == 1.0);
  CHECK(rep.macro_f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.weighted_f1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mismatched gold/prediction lengths are rejected") {
  CHECK_THROWS_AS(confusion_matrix({0, 1}, {0}, 2), Error);
  CHECK_THROWS_AS(confusion_matrix({0, 5}, {0, 0}, 2), Error);
}

TEST_CASE("emit_report writes the three artifacts with 4-decimal cells") {
  ConfusionMatrix cm = fixture_cm();
  EvalReport rep = aggregate_metrics(class_metrics(cm), cm);
  TempDir dir;
  std::string prefix = (dir.path / "run_").string();
  emit_report(rep, cm, {"A", "B", "C"}, prefix);

  std::string csv = slurp(dir.path / "run_report.csv");
  CHECK(csv.find("A,0.6667,1.0000,0.8000,2") != std::string::npos);
  CHECK(csv.find("macro avg") != std::string::npos);
  CHECK(csv.find("weighted avg") != std::string::npos);
  CHECK(csv.find("accuracy") != std::string::npos);

  std::string conf = slurp(dir.path / "run_confusion.csv");
  CHECK(conf.find("2,0,0") != std::string::npos);
  CHECK(conf.find("1,1,0") != std::string::npos);

  std::string json = slurp(dir.path / "run_report.json");
  CHECK(json.find("\"macro\"") != std::string::npos);
  CHECK(json.find("\"accuracy\"") != std::string::npos);
}

TEST_CASE("kfold split is stratified and covers every record once") {
  Dataset ds = ts::make_corpus(9, 5);
  LabelCodec codec = LabelCodec::fit(ds);
  SplitPlan plan;
  plan.mode = SplitPlan::Mode::KFold;
  plan.k = 3;
  plan.seed = 7;
  std::vector<int> folds = make_split(ds, codec, plan);
  REQUIRE(folds.size() == ds.size());
  // per class, each fold gets exactly 3 of the 9 records
  std::map<std::string, std::map<int, int>> per_class;
  for (size_t i = 0; i < ds.size(); ++i) {
    CHECK(folds[i] >= 0);
    CHECK(folds[i] < 3);
    ++per_class[ds.records[i].specialization][folds[i]];
  }
  for (const auto& [label, byfold] : per_class)
    for (const auto& [fold, n] : byfold) CHECK(n == 3);
  CHECK(make_split(ds, codec, plan) == folds);  // deterministic
}

TEST_CASE("holdout split uses round-half-up per-class train counts") {
  Dataset ds;
  for (int i = 0; i < 7; ++i)
    ds.records.push_back({"u", "a" + std::to_string(i), "A"});
  for (int i = 0; i < 10; ++i)
    ds.records.push_back({"u", "b" + std::to_string(i), "B"});
  LabelCodec codec = LabelCodec::fit(ds);
  SplitPlan plan;
  plan.mode = SplitPlan::Mode::Holdout;
  plan.train_fraction = 0.8;
  plan.seed = 3;
  std::vector<int> folds = make_split(ds, codec, plan);
  std::map<std::string, int> train_count;
  for (size_t i = 0; i < ds.size(); ++i)
    if (folds[i] == 0) ++train_count[ds.records[i].specialization];
  CHECK(train_count["A"] == 6);   // floor(0.8*7 + 0.5)
  CHECK(train_count["B"] == 8);   // floor(0.8*10 + 0.5)
}

TEST_CASE("holdout evaluation trains and scores the held-out slice") {
  Dataset ds = ts::make_corpus(10, 11);
  VocabSpec vspec;
  ModelConfig mc = eval_model();
  TrainConfig tc = eval_train();
  HoldoutResult res = holdout_evaluate(ds, vspec, mc, tc, 0.8);
  CHECK(res.outcome.report.n_examples == 24);  // 2 test records x 12 classes
  CHECK(res.outcome.cm.total() == 24);
  CHECK(res.outcome.report.macro_f1 >= 0.0);
  CHECK(res.checkpoint.codec.num_classes() == 12);
  CHECK(res.checkpoint.history.size() == size_t(tc.epochs));
}

TEST_CASE("synthetic records stay out of holdout test folds") {
  Dataset ds = ts::make_corpus(10, 11);
  // mark 4 records per class as augmentation output
  std::map<std::string, int> marked;
  for (auto& r : ds.records)
    if (marked[r.specialization]++ < 4)
      r.source_url = std::string(kSyntheticUrlPrefix) + r.source_url;
  VocabSpec vspec;
  HoldoutResult res =
      holdout_evaluate(ds, vspec, eval_model(), eval_train(), 0.5);
  // 5 test records per class before the synthetic ones move to train;
  // with 4 of 10 marked, at most 6 originals per class remain on average.
  CHECK(res.outcome.report.n_examples < 60);
  CHECK(res.outcome.report.n_examples > 0);

  HoldoutResult relaxed =
      holdout_evaluate(ds, vspec, eval_model(), eval_train(), 0.5, true);
  CHECK(relaxed.outcome.report.n_examples == 60);  // flag keeps them in test
}

TEST_CASE("kfold evaluation reports per-fold and aggregate scores") {
  Dataset ds = ts::make_corpus(6, 13);
  VocabSpec vspec;
  KFoldResult res = kfold_evaluate(ds, vspec, eval_model(), eval_train(), 3);
  REQUIRE(res.folds.size() == 3);
  long total = 0;
  double mean = 0.0;
  for (const auto& f : res.folds) {
    total += f.report.n_examples;
    mean += f.report.macro_f1;
  }
  CHECK(total == long(ds.size()));
  mean /= 3.0;
  CHECK(res.mean_macro_f1 == doctest::Approx(mean).epsilon(1e-12));
  CHECK(res.std_macro_f1 >= 0.0);
  CHECK_THROWS_AS(kfold_evaluate(ds, vspec, eval_model(), eval_train(), 1),
                  Error);
}
