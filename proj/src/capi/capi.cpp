#include "medroute.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "core/augment.hpp"
#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/ingest.hpp"
#include "core/server.hpp"
#include "core/train.hpp"

namespace fs = std::filesystem;

namespace {

thread_local std::string g_last_error;

mr_status kind_to_status(medroute::ErrorKind k) {
  using medroute::ErrorKind;
  switch (k) {
    case ErrorKind::InvalidArgument: return MR_ERR_INVALID_ARGUMENT;
    case ErrorKind::Io: return MR_ERR_IO;
    case ErrorKind::Parse: return MR_ERR_PARSE;
    case ErrorKind::Schema: return MR_ERR_SCHEMA;
    case ErrorKind::Checksum: return MR_ERR_CHECKSUM;
    case ErrorKind::Version: return MR_ERR_VERSION;
    case ErrorKind::Network: return MR_ERR_NETWORK;
    case ErrorKind::State: return MR_ERR_STATE;
    case ErrorKind::Internal: return MR_ERR_INTERNAL;
  }
  return MR_ERR_INTERNAL;
}

template <typename F>
mr_status guarded(F&& f) {
  try {
    f();
    return MR_OK;
  } catch (const medroute::Error& e) {
    g_last_error = e.what();
    return kind_to_status(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MR_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void check_ptr(const void* p, const char* what) {
  medroute::require(p != nullptr, medroute::ErrorKind::InvalidArgument,
                    std::string(what) + " must not be NULL");
}

// Stratified 90/10 carve-out used by mr_train for best-epoch selection.
void split_train_val(const medroute::Dataset& ds,
                     const medroute::LabelCodec& codec, uint64_t seed,
                     medroute::Dataset& train, medroute::Dataset& val) {
  medroute::SplitPlan plan;
  plan.mode = medroute::SplitPlan::Mode::Holdout;
  plan.train_fraction = 0.9;
  plan.seed = seed;
  auto fold = medroute::make_split(ds, codec, plan);
  for (size_t i = 0; i < ds.records.size(); ++i)
    (fold[i] == 0 ? train : val).records.push_back(ds.records[i]);
  if (val.records.empty()) val.records = train.records;
}

}  // namespace

struct mr_dataset {
  medroute::Dataset ds;
};

struct mr_model {
  medroute::Checkpoint ckpt;
  std::shared_ptr<const medroute::RouteService> service;
};

struct mr_server {
  std::unique_ptr<medroute::HttpServer> server;
};

extern "C" {

const char* mr_status_name(mr_status status) {
  switch (status) {
    case MR_OK: return "ok";
    case MR_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case MR_ERR_IO: return "io";
    case MR_ERR_PARSE: return "parse";
    case MR_ERR_SCHEMA: return "schema";
    case MR_ERR_CHECKSUM: return "checksum";
    case MR_ERR_VERSION: return "version";
    case MR_ERR_NETWORK: return "network";
    case MR_ERR_STATE: return "state";
    case MR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* mr_last_error(void) { return g_last_error.c_str(); }

void mr_string_free(char* s) { std::free(s); }

mr_status mr_dataset_read_csv(const char* path, mr_dataset** out) {
  return guarded([&] {
    check_ptr(path, "path");
    check_ptr(out, "out");
    *out = new mr_dataset{medroute::read_csv(path)};
  });
}

mr_status mr_dataset_write_csv(const mr_dataset* ds, const char* path) {
  return guarded([&] {
    check_ptr(ds, "ds");
    check_ptr(path, "path");
    medroute::write_csv(ds->ds, path);
  });
}

size_t mr_dataset_size(const mr_dataset* ds) {
  return ds ? ds->ds.size() : 0;
}

void mr_dataset_free(mr_dataset* ds) { delete ds; }

mr_status mr_dataset_stats_json(const mr_dataset* ds, char** json_out) {
  return guarded([&] {
    check_ptr(ds, "ds");
    check_ptr(json_out, "json_out");
    auto s = medroute::stats(ds->ds);
    nlohmann::json j;
    j["total"] = s.total;
    j["per_class"] = nlohmann::json::object();
    for (const auto& [label, count] : s.per_class_counts)
      j["per_class"][label] = count;
    *json_out = dup_string(j.dump(2));
  });
}

mr_status mr_dataset_augment(const mr_dataset* ds, uint32_t target,
                             uint64_t seed, int keep_majority,
                             mr_dataset** out) {
  return guarded([&] {
    check_ptr(ds, "ds");
    check_ptr(out, "out");
    medroute::AugmentConfig cfg;
    cfg.target_per_class = target;
    cfg.seed = seed;
    cfg.downsample_majority = keep_majority == 0;
    *out = new mr_dataset{medroute::balance_dataset(ds->ds, cfg)};
  });
}

mr_status mr_ingest_run(const char* source_spec_path, const char* urls_path,
                        const char* out_dir, int allow_network, int retries,
                        size_t* fetched_out, size_t* failed_out) {
  return guarded([&] {
    check_ptr(source_spec_path, "source_spec_path");
    check_ptr(urls_path, "urls_path");
    check_ptr(out_dir, "out_dir");
    medroute::SourceSpec spec = medroute::load_source_spec(source_spec_path);
    if (retries >= 0) spec.retries = retries;
    auto urls = medroute::read_url_list(urls_path);
    auto summary =
        medroute::run_ingest(spec, urls, out_dir, allow_network != 0);
    if (fetched_out) *fetched_out = summary.fetched;
    if (failed_out) *failed_out = summary.failed;
  });
}

mr_status mr_dataset_build_from_pages(const char* pages_dir,
                                      const char* rules_spec_path,
                                      mr_dataset** out, size_t* skipped_out) {
  return guarded([&] {
    check_ptr(pages_dir, "pages_dir");
    check_ptr(rules_spec_path, "rules_spec_path");
    check_ptr(out, "out");
    medroute::SourceSpec spec = medroute::load_source_spec(rules_spec_path);
    auto built =
        medroute::build_dataset_from_pages(pages_dir, spec.extraction_rules);
    if (skipped_out) *skipped_out = built.skips.size();
    *out = new mr_dataset{std::move(built.dataset)};
  });
}

mr_status mr_train(const mr_dataset* data, const char* config_json,
                   const char* ckpt_path, int baseline,
                   char** history_csv_out) {
  return guarded([&] {
    check_ptr(data, "data");
    medroute::PipelineConfig cfg =
        medroute::parse_pipeline_config(config_json ? config_json : "");
    medroute::LabelCodec codec = medroute::LabelCodec::fit(data->ds);
    medroute::Dataset train, val;
    split_train_val(data->ds, codec, cfg.train.seed, train, val);
    medroute::Vocabulary vocab =
        medroute::Vocabulary::build(train, cfg.vocab.min_freq,
                                    cfg.vocab.max_size);

    if (baseline) {
      medroute::BowModel bow = medroute::train_baseline_bow(
          train, vocab, codec, cfg.train.epochs, cfg.baseline_lr,
          cfg.train.batch_size, cfg.train.seed);
      medroute::EvalReport report =
          medroute::evaluate_bow(bow, val, vocab, codec);
      if (history_csv_out) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "epoch,train_loss,val_macro_f1,lr_last\n%d,,%.6f,\n",
                      cfg.train.epochs, report.macro_f1);
        *history_csv_out = dup_string(buf);
      }
      return;
    }

    cfg.model.vocab_size = vocab.size();
    cfg.model.n_classes = codec.num_classes();
    medroute::Checkpoint ckpt = medroute::train_model(
        train, val, vocab, codec, cfg.model, cfg.train);
    if (ckpt_path) medroute::save_checkpoint(ckpt, ckpt_path);
    if (history_csv_out)
      *history_csv_out = dup_string(medroute::history_csv(ckpt.history));
  });
}

mr_status mr_eval(const mr_dataset* data, const char* config_json,
                  const char* mode, int k, double train_fraction,
                  int synthetic_in_test, const char* out_dir, char** summary_out) {
  return guarded([&] {
    check_ptr(data, "data");
    check_ptr(mode, "mode");
    check_ptr(out_dir, "out_dir");
    medroute::PipelineConfig cfg =
        medroute::parse_pipeline_config(config_json ? config_json : "");
    medroute::LabelCodec codec = medroute::LabelCodec::fit(data->ds);
    cfg.model.n_classes = codec.num_classes();
    fs::create_directories(out_dir);
    std::string prefix = (fs::path(out_dir) / "").string();

    nlohmann::json summary;
    if (std::string(mode) == "holdout") {
      auto result = medroute::holdout_evaluate(
          data->ds, cfg.vocab, cfg.model, cfg.train, train_fraction,
          synthetic_in_test != 0);
      medroute::emit_report(result.outcome.report, result.outcome.cm,
                            codec.labels(), prefix);
      summary["mode"] = "holdout";
      summary["train_fraction"] = train_fraction;
      summary["macro_f1"] = result.outcome.report.macro_f1;
      summary["accuracy"] = result.outcome.report.accuracy;
    } else if (std::string(mode) == "kfold") {
      auto result = medroute::kfold_evaluate(data->ds, cfg.vocab, cfg.model,
                                             cfg.train, k, synthetic_in_test != 0);
      summary["mode"] = "kfold";
      summary["k"] = k;
      summary["mean_macro_f1"] = result.mean_macro_f1;
      summary["std_macro_f1"] = result.std_macro_f1;
      summary["folds"] = nlohmann::json::array();
      for (size_t f = 0; f < result.folds.size(); ++f) {
        medroute::emit_report(result.folds[f].report, result.folds[f].cm,
                              codec.labels(),
                              prefix + "fold" + std::to_string(f) + "_");
        summary["folds"].push_back(result.folds[f].report.macro_f1);
      }
    } else {
      medroute::fail(medroute::ErrorKind::InvalidArgument,
                     "mode must be 'kfold' or 'holdout'");
    }
    std::ofstream sf(fs::path(out_dir) / "summary.json", std::ios::binary);
    medroute::require(sf.good(), medroute::ErrorKind::Io,
                      "cannot write summary.json");
    sf << summary.dump(2) << "\n";
    if (summary_out) *summary_out = dup_string(summary.dump(2));
  });
}

mr_status mr_gridsearch_batch(const char* config_json, const int* candidates,
                              size_t n_candidates, char** table_json_out) {
  return guarded([&] {
    check_ptr(candidates, "candidates");
    medroute::PipelineConfig cfg =
        medroute::parse_pipeline_config(config_json ? config_json : "");
    if (cfg.model.vocab_size <= 0) cfg.model.vocab_size = 1000;
    if (cfg.model.n_classes <= 0) cfg.model.n_classes = 10;
    medroute::GridSearchSpec spec;
    spec.seed = cfg.model.seed;
    auto result = medroute::grid_search_batch_size(
        cfg.model, std::vector<int>(candidates, candidates + n_candidates),
        spec);
    nlohmann::json j;
    j["chosen_batch_size"] = result.chosen_batch_size;
    j["table"] = nlohmann::json::array();
    for (const auto& e : result.table)
      j["table"].push_back({{"batch_size", e.batch_size},
                            {"examples_per_second", e.examples_per_second},
                            {"feasible", e.feasible}});
    if (table_json_out) *table_json_out = dup_string(j.dump(2));
  });
}

mr_status mr_model_open(const char* ckpt_path, mr_model** out) {
  return guarded([&] {
    check_ptr(ckpt_path, "ckpt_path");
    check_ptr(out, "out");
    auto m = std::make_unique<mr_model>();
    m->ckpt = medroute::load_checkpoint(ckpt_path);
    m->service = std::make_shared<medroute::RouteService>(m->ckpt);
    *out = m.release();
  });
}

void mr_model_free(mr_model* model) { delete model; }

const char* mr_model_version(const mr_model* model) {
  return model ? model->ckpt.version_id.c_str() : "";
}

mr_status mr_model_predict_json(const mr_model* model, const char* text,
                                int k, double threshold, char** json_out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(text, "text");
    check_ptr(json_out, "json_out");
    *json_out = dup_string(model->service->classify_json(text, k, threshold));
  });
}

mr_status mr_server_create(double threshold, mr_server** out) {
  return guarded([&] {
    check_ptr(out, "out");
    auto s = std::make_unique<mr_server>();
    s->server = std::make_unique<medroute::HttpServer>(nullptr, threshold);
    *out = s.release();
  });
}

mr_status mr_server_attach_model(mr_server* server, const char* ckpt_path) {
  return guarded([&] {
    check_ptr(server, "server");
    check_ptr(ckpt_path, "ckpt_path");
    auto ckpt = medroute::load_checkpoint(ckpt_path);
    server->server->set_service(
        std::make_shared<medroute::RouteService>(std::move(ckpt)));
  });
}

mr_status mr_server_run(mr_server* server, const char* host, int port) {
  return guarded([&] {
    check_ptr(server, "server");
    check_ptr(host, "host");
    server->server->run(host, port);
  });
}

void mr_server_stop(mr_server* server) {
  if (server) server->server->stop();
}

void mr_server_free(mr_server* server) { delete server; }

}  // extern "C"
