// medroute command-line interface. All pipeline work goes through the C
// API in medroute.h; this file only handles argument parsing and I/O.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medroute.h"

namespace {

[[noreturn]] void die(mr_status status) {
  std::cerr << "error (" << mr_status_name(status) << "): " << mr_last_error()
            << "\n";
  std::exit(1);
}

void check(mr_status status) {
  if (status != MR_OK) die(status);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f.good()) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(1);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  mr_string_free(s);
  return out;
}

mr_server* g_server = nullptr;

void handle_sigint(int) {
  if (g_server) mr_server_stop(g_server);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medroute: medical question routing pipeline"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "Fetch Q&A pages into a pages directory");
  std::string source_spec, urls_file, out_dir;
  bool allow_network = false;
  int retries = -1;
  ingest->add_option("--source", source_spec, "Source spec JSON")->required();
  ingest->add_option("--urls", urls_file, "URL list, one per line")
      ->required();
  ingest->add_option("--out", out_dir, "Output pages directory")->required();
  ingest->add_flag("--allow-network", allow_network,
                   "Permit non-file:// URLs");
  ingest->add_option("--retries", retries, "Retry count for failed fetches");

  // dataset build / stats
  auto* dataset = app.add_subcommand("dataset", "Corpus operations");
  dataset->require_subcommand(1);
  auto* build = dataset->add_subcommand(
      "build", "Extract records from ingested pages into a CSV corpus");
  std::string pages_dir, rules_spec, corpus_out;
  build->add_option("--pages", pages_dir, "Pages directory")->required();
  build->add_option("--rules", rules_spec, "Spec JSON with extraction_rules")
      ->required();
  build->add_option("--out", corpus_out, "Output corpus CSV")->required();
  auto* stats_cmd =
      dataset->add_subcommand("stats", "Per-class counts of a corpus CSV");
  std::string stats_csv;
  stats_cmd->add_option("csv", stats_csv, "Corpus CSV")->required();

  // augment
  auto* augment = app.add_subcommand(
      "augment", "Balance class counts by word-shuffling oversampling");
  std::string aug_in, aug_out;
  unsigned target = 0;
  uint64_t seed = 42;
  bool keep_majority = false;
  augment->add_option("--in", aug_in, "Input corpus CSV")->required();
  augment->add_option("--out", aug_out, "Output balanced CSV")->required();
  augment->add_option("--target", target, "Records per class")->required();
  augment->add_option("--seed", seed, "PRNG seed");
  augment->add_flag("--keep-majority", keep_majority,
                    "Do not downsample surplus classes");

  // train
  auto* train = app.add_subcommand("train", "Train the routing classifier");
  std::string train_data, train_config, ckpt_out, history_out;
  bool baseline_bow = false;
  train->add_option("--data", train_data, "Balanced corpus CSV")->required();
  train->add_option("--config", train_config, "Pipeline config JSON");
  train->add_option("--out", ckpt_out, "Output checkpoint path");
  train->add_option("--history", history_out,
                    "Write per-epoch metrics CSV here");
  train->add_flag("--baseline-bow", baseline_bow,
                  "Train the bag-of-words baseline instead");

  // gridsearch-batch
  auto* grid = app.add_subcommand("gridsearch-batch",
                                  "Batch-size throughput grid search");
  std::string grid_config;
  std::vector<int> candidates;
  grid->add_option("--config", grid_config, "Pipeline config JSON");
  grid->add_option("--candidates", candidates, "Batch sizes to try")
      ->required()
      ->delimiter(',');

  // eval
  auto* eval_cmd =
      app.add_subcommand("eval", "K-fold or holdout evaluation");
  std::string eval_data, eval_config, eval_out, eval_mode = "kfold";
  int kfold = 3;
  double train_frac = 0.9;
  bool synthetic_in_test = false;
  eval_cmd->add_option("--data", eval_data, "Corpus CSV")->required();
  eval_cmd->add_option("--config", eval_config, "Pipeline config JSON");
  eval_cmd->add_option("--mode", eval_mode, "kfold or holdout");
  eval_cmd->add_option("--k", kfold, "Fold count for kfold mode");
  eval_cmd->add_option("--train-frac", train_frac,
                       "Train fraction for holdout mode");
  eval_cmd->add_option("--out", eval_out, "Report output directory")
      ->required();
  eval_cmd->add_flag("--synthetic-in-test", synthetic_in_test,
                     "Allow synthetic records in test folds");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP routing service");
  std::string model_path, host = "0.0.0.0";
  int port = 8080;
  double threshold = 0.5;
  serve->add_option("--model", model_path, "Checkpoint file")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--threshold", threshold, "Uncertainty threshold");

  // predict
  auto* predict = app.add_subcommand("predict", "One-shot prediction");
  std::string predict_model, text;
  int topk = 5;
  double predict_threshold = 0.5;
  predict->add_option("--model", predict_model, "Checkpoint file")
      ->required();
  predict->add_option("--text", text, "Query text")->required();
  predict->add_option("--k", topk, "Number of ranked classes");
  predict->add_option("--threshold", predict_threshold,
                      "Uncertainty threshold");

  CLI11_PARSE(app, argc, argv);

  if (*ingest) {
    size_t fetched = 0, failed = 0;
    check(mr_ingest_run(source_spec.c_str(), urls_file.c_str(),
                        out_dir.c_str(), allow_network ? 1 : 0, retries,
                        &fetched, &failed));
    std::cout << "fetched " << fetched << " pages, " << failed
              << " failures recorded in manifest\n";
  } else if (*build) {
    mr_dataset* ds = nullptr;
    size_t skipped = 0;
    check(mr_dataset_build_from_pages(pages_dir.c_str(), rules_spec.c_str(),
                                      &ds, &skipped));
    check(mr_dataset_write_csv(ds, corpus_out.c_str()));
    std::cout << "wrote " << mr_dataset_size(ds) << " records to "
              << corpus_out << " (" << skipped << " pages skipped)\n";
    mr_dataset_free(ds);
  } else if (*stats_cmd) {
    mr_dataset* ds = nullptr;
    check(mr_dataset_read_csv(stats_csv.c_str(), &ds));
    char* json = nullptr;
    check(mr_dataset_stats_json(ds, &json));
    std::cout << take_string(json) << "\n";
    mr_dataset_free(ds);
  } else if (*augment) {
    mr_dataset* ds = nullptr;
    check(mr_dataset_read_csv(aug_in.c_str(), &ds));
    mr_dataset* balanced = nullptr;
    check(mr_dataset_augment(ds, target, seed, keep_majority ? 1 : 0,
                             &balanced));
    check(mr_dataset_write_csv(balanced, aug_out.c_str()));
    std::cout << "wrote " << mr_dataset_size(balanced) << " records to "
              << aug_out << "\n";
    mr_dataset_free(balanced);
    mr_dataset_free(ds);
  } else if (*train) {
    mr_dataset* ds = nullptr;
    check(mr_dataset_read_csv(train_data.c_str(), &ds));
    std::string config =
        train_config.empty() ? "" : read_file(train_config);
    char* history = nullptr;
    check(mr_train(ds, config.c_str(),
                   ckpt_out.empty() ? nullptr : ckpt_out.c_str(),
                   baseline_bow ? 1 : 0, &history));
    std::string hist = take_string(history);
    if (!history_out.empty()) {
      std::ofstream f(history_out, std::ios::binary);
      f << hist;
    }
    std::cout << hist;
    if (!ckpt_out.empty() && !baseline_bow)
      std::cout << "checkpoint written to " << ckpt_out << "\n";
    mr_dataset_free(ds);
  } else if (*grid) {
    std::string config = grid_config.empty() ? "" : read_file(grid_config);
    char* table = nullptr;
    check(mr_gridsearch_batch(config.c_str(), candidates.data(),
                              candidates.size(), &table));
    std::cout << take_string(table) << "\n";
  } else if (*eval_cmd) {
    mr_dataset* ds = nullptr;
    check(mr_dataset_read_csv(eval_data.c_str(), &ds));
    std::string config = eval_config.empty() ? "" : read_file(eval_config);
    char* summary = nullptr;
    check(mr_eval(ds, config.c_str(), eval_mode.c_str(), kfold, train_frac,
                  synthetic_in_test ? 1 : 0, eval_out.c_str(), &summary));
    std::cout << take_string(summary) << "\n";
    mr_dataset_free(ds);
  } else if (*serve) {
    check(mr_server_create(threshold, &g_server));
    check(mr_server_attach_model(g_server, model_path.c_str()));
    std::signal(SIGINT, handle_sigint);
    std::signal(SIGTERM, handle_sigint);
    std::cerr << "serving on " << host << ":" << port << "\n";
    check(mr_server_run(g_server, host.c_str(), port));
    mr_server_free(g_server);
  } else if (*predict) {
    mr_model* model = nullptr;
    check(mr_model_open(predict_model.c_str(), &model));
    char* json = nullptr;
    check(mr_model_predict_json(model, text.c_str(), topk, predict_threshold,
                                &json));
    std::cout << take_string(json) << "\n";
    mr_model_free(model);
  }
  return 0;
}
