#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "core/dataset.hpp"
#include "medroute.h"
#include "support/synthetic.hpp"

namespace ts = medroute::testsupport;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("medroute_capi_" + std::to_string(uint64_t(::getpid())) + "_" +
            std::to_string(uint64_t(std::rand())));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kSmallConfig = R"({
  "model": {"max_len": 24, "d_model": 16, "n_heads": 2, "n_layers": 1,
            "d_ff": 32, "seed": 9},
  "train": {"peak_lr": 3e-3, "batch_size": 16, "epochs": 2, "seed": 4}
})";

std::string write_corpus_csv(const fs::path& dir, size_t per_class,
                             uint64_t seed) {
  std::string path = (dir / "corpus.csv").string();
  medroute::write_csv(ts::make_corpus(per_class, seed), path);
  return path;
}

}  // namespace

TEST_CASE("status names cover every code") {
  CHECK(std::string(mr_status_name(MR_OK)) == "ok");
  CHECK(std::string(mr_status_name(MR_ERR_CHECKSUM)) == "checksum");
  CHECK(std::string(mr_status_name(MR_ERR_INTERNAL)) == "internal");
}

TEST_CASE("dataset csv round trip through the C API") {
  TempDir dir;
  std::string path = write_corpus_csv(dir.path, 3, 1);

  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);
  CHECK(mr_dataset_size(ds) == 36);

  std::string copy = (dir.path / "copy.csv").string();
  REQUIRE(mr_dataset_write_csv(ds, copy.c_str()) == MR_OK);
  mr_dataset* ds2 = nullptr;
  REQUIRE(mr_dataset_read_csv(copy.c_str(), &ds2) == MR_OK);
  CHECK(mr_dataset_size(ds2) == 36);
  mr_dataset_free(ds);
  mr_dataset_free(ds2);
}

TEST_CASE("missing file reports an io error with a message") {
  mr_dataset* ds = nullptr;
  mr_status st = mr_dataset_read_csv("/nonexistent/nope.csv", &ds);
  CHECK(st == MR_ERR_IO);
  CHECK(std::strlen(mr_last_error()) > 0);
  CHECK(mr_dataset_read_csv(nullptr, &ds) == MR_ERR_INVALID_ARGUMENT);
}

TEST_CASE("stats json lists per-class counts") {
  TempDir dir;
  std::string path = write_corpus_csv(dir.path, 2, 1);
  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);
  char* out = nullptr;
  REQUIRE(mr_dataset_stats_json(ds, &out) == MR_OK);
  json j = json::parse(out);
  CHECK(j["total"] == 24);
  CHECK(j["per_class"].size() == 12);
  CHECK(j["per_class"]["лор"] == 2);
  mr_string_free(out);
  mr_dataset_free(ds);
}

TEST_CASE("augmentation balances classes through the C API") {
  TempDir dir;
  medroute::Dataset skew = ts::inject_imbalance(ts::make_corpus(6, 2),
                                                {{0, 2}, {5, 3}});
  std::string path = (dir.path / "skew.csv").string();
  medroute::write_csv(skew, path);

  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);
  mr_dataset* balanced = nullptr;
  REQUIRE(mr_dataset_augment(ds, 6, 7, 0, &balanced) == MR_OK);
  CHECK(mr_dataset_size(balanced) == 72);

  char* out = nullptr;
  REQUIRE(mr_dataset_stats_json(balanced, &out) == MR_OK);
  json j = json::parse(out);
  for (const auto& [label, count] : j["per_class"].items())
    CHECK(count == 6);
  mr_string_free(out);
  mr_dataset_free(balanced);
  mr_dataset_free(ds);
}

TEST_CASE("train writes a loadable checkpoint and a history table") {
  TempDir dir;
  std::string path = write_corpus_csv(dir.path, 6, 3);
  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);

  std::string ckpt = (dir.path / "model.mdrt").string();
  char* history = nullptr;
  REQUIRE(mr_train(ds, kSmallConfig, ckpt.c_str(), 0, &history) == MR_OK);
  REQUIRE(history != nullptr);
  CHECK(std::string(history).starts_with(
      "epoch,train_loss,val_macro_f1,lr_last"));
  mr_string_free(history);

  mr_model* model = nullptr;
  REQUIRE(mr_model_open(ckpt.c_str(), &model) == MR_OK);
  CHECK(std::strlen(mr_model_version(model)) == 16);

  char* pred = nullptr;
  REQUIRE(mr_model_predict_json(model, "болит сердце и давление", 3, 0.5,
                                &pred) == MR_OK);
  json j = json::parse(pred);
  REQUIRE(j["predictions"].size() == 3);
  CHECK(j["predictions"][0]["prob"].get<double>() >=
        j["predictions"][1]["prob"].get<double>());
  mr_string_free(pred);

  char* bad = nullptr;
  CHECK(mr_model_predict_json(model, "   ", 3, 0.5, &bad) ==
        MR_ERR_INVALID_ARGUMENT);
  mr_model_free(model);
  mr_dataset_free(ds);
}

TEST_CASE("baseline mode reports metrics without a checkpoint") {
  TempDir dir;
  std::string path = write_corpus_csv(dir.path, 4, 3);
  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);
  char* history = nullptr;
  REQUIRE(mr_train(ds, kSmallConfig, nullptr, 1, &history) == MR_OK);
  REQUIRE(history != nullptr);
  CHECK(std::string(history).find("val_macro_f1") != std::string::npos);
  mr_string_free(history);
  mr_dataset_free(ds);
}

TEST_CASE("opening a corrupted checkpoint yields a checksum error") {
  TempDir dir;
  std::string path = write_corpus_csv(dir.path, 3, 3);
  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);
  std::string ckpt = (dir.path / "model.mdrt").string();
  REQUIRE(mr_train(ds, kSmallConfig, ckpt.c_str(), 0, nullptr) == MR_OK);
  mr_dataset_free(ds);

  std::fstream f(ckpt, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(200);
  f.put('\x7f');
  f.close();
  mr_model* model = nullptr;
  CHECK(mr_model_open(ckpt.c_str(), &model) == MR_ERR_CHECKSUM);
}

TEST_CASE("holdout evaluation emits reports and a summary") {
  TempDir dir;
  std::string path = write_corpus_csv(dir.path, 8, 5);
  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);

  std::string out_dir = (dir.path / "eval").string();
  char* summary = nullptr;
  REQUIRE(mr_eval(ds, kSmallConfig, "holdout", 0, 0.75, 0, out_dir.c_str(),
                  &summary) == MR_OK);
  json j = json::parse(summary);
  CHECK(j["mode"] == "holdout");
  CHECK(j["macro_f1"].is_number());
  mr_string_free(summary);
  CHECK(fs::exists(fs::path(out_dir) / "report.json"));
  CHECK(fs::exists(fs::path(out_dir) / "report.csv"));
  CHECK(fs::exists(fs::path(out_dir) / "confusion.csv"));
  CHECK(fs::exists(fs::path(out_dir) / "summary.json"));

  char* unused = nullptr;
  CHECK(mr_eval(ds, kSmallConfig, "bogus", 0, 0.75, 0, out_dir.c_str(),
                &unused) == MR_ERR_INVALID_ARGUMENT);
  mr_dataset_free(ds);
}

TEST_CASE("kfold evaluation emits one report set per fold") {
  TempDir dir;
  std::string path = write_corpus_csv(dir.path, 6, 5);
  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);
  std::string out_dir = (dir.path / "kfold").string();
  char* summary = nullptr;
  REQUIRE(mr_eval(ds, kSmallConfig, "kfold", 3, 0.0, 0, out_dir.c_str(),
                  &summary) == MR_OK);
  json j = json::parse(summary);
  CHECK(j["k"] == 3);
  REQUIRE(j["folds"].size() == 3);
  mr_string_free(summary);
  for (int f = 0; f < 3; ++f)
    CHECK(fs::exists(fs::path(out_dir) /
                     ("fold" + std::to_string(f) + "_report.json")));
  mr_dataset_free(ds);
}

TEST_CASE("batch-size grid search returns a json table") {
  int candidates[] = {4, 8};
  char* out = nullptr;
  REQUIRE(mr_gridsearch_batch(
              R"({"model": {"d_model": 16, "n_heads": 2, "n_layers": 1,
                            "d_ff": 32, "max_len": 16}})",
              candidates, 2, &out) == MR_OK);
  json j = json::parse(out);
  CHECK((j["chosen_batch_size"] == 4 || j["chosen_batch_size"] == 8));
  CHECK(j["table"].size() == 2);
  mr_string_free(out);
}

TEST_CASE("invalid config json is a parse error") {
  TempDir dir;
  std::string path = write_corpus_csv(dir.path, 2, 1);
  mr_dataset* ds = nullptr;
  REQUIRE(mr_dataset_read_csv(path.c_str(), &ds) == MR_OK);
  CHECK(mr_train(ds, "{not json", nullptr, 1, nullptr) == MR_ERR_PARSE);
  mr_dataset_free(ds);
}
