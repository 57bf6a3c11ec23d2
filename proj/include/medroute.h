/* medroute — medical query-to-specialist routing pipeline.
 *
 * C API over the C++ core: opaque handles, integer status codes,
 * thread-local error messages. All strings are UTF-8. Strings returned
 * through char** out-parameters are owned by the caller and must be
 * released with mr_string_free().
 */
#ifndef MEDROUTE_H
#define MEDROUTE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mr_status {
  MR_OK = 0,
  MR_ERR_INVALID_ARGUMENT = 1,
  MR_ERR_IO = 2,
  MR_ERR_PARSE = 3,
  MR_ERR_SCHEMA = 4,
  MR_ERR_CHECKSUM = 5,
  MR_ERR_VERSION = 6,
  MR_ERR_NETWORK = 7,
  MR_ERR_STATE = 8,
  MR_ERR_INTERNAL = 9
} mr_status;

const char* mr_status_name(mr_status status);

/* Message for the most recent failing call on this thread. */
const char* mr_last_error(void);

void mr_string_free(char* s);

/* ---- datasets ---------------------------------------------------- */

typedef struct mr_dataset mr_dataset;

mr_status mr_dataset_read_csv(const char* path, mr_dataset** out);
mr_status mr_dataset_write_csv(const mr_dataset* ds, const char* path);
size_t mr_dataset_size(const mr_dataset* ds);
void mr_dataset_free(mr_dataset* ds);

/* Per-class counts and total as a JSON object. */
mr_status mr_dataset_stats_json(const mr_dataset* ds, char** json_out);

/* Word-shuffling oversampler; brings every class to exactly `target`
 * records. keep_majority != 0 leaves surplus classes intact. */
mr_status mr_dataset_augment(const mr_dataset* ds, uint32_t target,
                             uint64_t seed, int keep_majority,
                             mr_dataset** out);

/* ---- ingestion --------------------------------------------------- */

/* Fetches the URLs listed in `urls_path` (one per line) as described by
 * the source spec JSON and writes page files plus manifest.json under
 * out_dir. Remote URLs require allow_network != 0; file:// fixtures
 * always work. retries < 0 keeps the spec's value. */
mr_status mr_ingest_run(const char* source_spec_path, const char* urls_path,
                        const char* out_dir, int allow_network, int retries,
                        size_t* fetched_out, size_t* failed_out);

/* Extracts, normalizes and deduplicates records from an ingested pages
 * directory. skipped_out (optional) receives the skipped-page count. */
mr_status mr_dataset_build_from_pages(const char* pages_dir,
                                      const char* rules_spec_path,
                                      mr_dataset** out, size_t* skipped_out);

/* ---- training and evaluation ------------------------------------- */

/* config_json holds a "model" and a "train" object (see README).
 * baseline != 0 trains the bag-of-words baseline instead and reports its
 * metrics; no checkpoint is written in that mode (ckpt_path may be NULL).
 * history_csv_out (optional) receives the per-epoch metrics table. */
mr_status mr_train(const mr_dataset* data, const char* config_json,
                   const char* ckpt_path, int baseline,
                   char** history_csv_out);

/* mode: "kfold" (uses k) or "holdout" (uses train_fraction). Writes
 * report.json / report.csv / confusion.csv (per fold for kfold) under
 * out_dir and returns a summary JSON. */
mr_status mr_eval(const mr_dataset* data, const char* config_json,
                  const char* mode, int k, double train_fraction,
                  int synthetic_in_test, const char* out_dir, char** summary_out);

/* Throughput grid search over batch-size candidates on a synthetic
 * dataset; returns the table and chosen size as JSON. */
mr_status mr_gridsearch_batch(const char* config_json, const int* candidates,
                              size_t n_candidates, char** table_json_out);

/* ---- inference and serving --------------------------------------- */

typedef struct mr_model mr_model;

mr_status mr_model_open(const char* ckpt_path, mr_model** out);
void mr_model_free(mr_model* model);
const char* mr_model_version(const mr_model* model);

/* Ranked top-k specializations with probabilities as JSON. */
mr_status mr_model_predict_json(const mr_model* model, const char* text,
                                int k, double threshold, char** json_out);

typedef struct mr_server mr_server;

/* The server starts without a model and answers 503 until a checkpoint
 * is attached. */
mr_status mr_server_create(double threshold, mr_server** out);
mr_status mr_server_attach_model(mr_server* server, const char* ckpt_path);
/* Blocks until mr_server_stop() from another thread or signal handler. */
mr_status mr_server_run(mr_server* server, const char* host, int port);
void mr_server_stop(mr_server* server);
void mr_server_free(mr_server* server);

#ifdef __cplusplus
}
#endif

#endif /* MEDROUTE_H */
