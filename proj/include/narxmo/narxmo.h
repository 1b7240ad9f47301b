#ifndef NARXMO_H
#define NARXMO_H

#include <stddef.h>
#include <stdint.h>

#if defined(NARXMO_BUILDING_LIBRARY)
#define NARXMO_API __attribute__((visibility("default")))
#else
#define NARXMO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum narxmo_status {
    NARXMO_OK = 0,
    NARXMO_E_ARGUMENT = 1,   /* invalid argument or precondition */
    NARXMO_E_PARSE = 2,      /* malformed CSV / JSON input */
    NARXMO_E_CONFIG = 3,     /* invalid experiment configuration */
    NARXMO_E_DEGENERATE = 4, /* undefined quantity for the given data */
    NARXMO_E_RUNTIME = 5,    /* numerical or integration failure */
    NARXMO_E_IO = 6          /* file system failure */
} narxmo_status;

typedef struct narxmo_model_set narxmo_model_set;
typedef struct narxmo_dataset narxmo_dataset;
typedef struct narxmo_archive narxmo_archive;
typedef struct narxmo_model narxmo_model;

/* Message for the last failing call on this thread; never NULL. */
NARXMO_API const char* narxmo_last_error(void);
NARXMO_API const char* narxmo_version(void);

/* Frees strings returned through char** out-parameters. */
NARXMO_API void narxmo_string_free(char* s);

/* Candidate term set. */
NARXMO_API narxmo_status narxmo_model_set_create(int n_u, int n_y, int n_l, narxmo_model_set** out);
NARXMO_API void narxmo_model_set_free(narxmo_model_set* ms);
NARXMO_API size_t narxmo_model_set_size(const narxmo_model_set* ms);
/* {"schema_version", "model_set", "count", "terms": [...]} */
NARXMO_API narxmo_status narxmo_model_set_to_json(const narxmo_model_set* ms, char** json_out);

/* Input/output records. samples / estimation_len of 0 keep the system defaults. */
NARXMO_API narxmo_status narxmo_dataset_simulate(const char* system, uint64_t seed, size_t samples,
                                                 size_t estimation_len, narxmo_dataset** out);
/* estimation_len 0 means 70% of the file. */
NARXMO_API narxmo_status narxmo_dataset_load_csv(const char* path, size_t estimation_len, narxmo_dataset** out);
NARXMO_API narxmo_status narxmo_dataset_write_csv(const narxmo_dataset* d, const char* path);
NARXMO_API size_t narxmo_dataset_size(const narxmo_dataset* d);
NARXMO_API size_t narxmo_dataset_estimation_len(const narxmo_dataset* d);
NARXMO_API void narxmo_dataset_free(narxmo_dataset* d);

/* Archive JSON as written by search. */
NARXMO_API narxmo_status narxmo_archive_read(const char* path, narxmo_archive** out);
NARXMO_API size_t narxmo_archive_size(const narxmo_archive* a);
NARXMO_API void narxmo_archive_free(narxmo_archive* a);

NARXMO_API narxmo_status narxmo_model_read(const char* path, narxmo_model** out);
/* "md1", "md2" or "md3": the Duffing reference models. */
NARXMO_API narxmo_status narxmo_model_reference(const char* name, narxmo_model** out);
NARXMO_API narxmo_status narxmo_model_to_json(const narxmo_model* m, char** json_out);
NARXMO_API void narxmo_model_free(narxmo_model* m);

/* Normalized preference weights; `weights` must hold n_ranks values. */
NARXMO_API narxmo_status narxmo_preference_weights(const int* objective_ranks, size_t n_ranks, double intensity,
                                                   double* weights);

/* Experiment pipelines. config_json is the configuration document; results
 * are written under out_dir and the summary document is returned. */
NARXMO_API narxmo_status narxmo_search(const char* config_json, size_t workers, const char* out_dir,
                                       char** summary_out);
NARXMO_API narxmo_status narxmo_sweep(const char* config_json, size_t workers, const char* out_dir,
                                      char** summary_out);

/* Ranks an archive with "mmd" or "mtd". Writes the full ranking to csv_path
 * (may be NULL) and returns the top entries as JSON. */
NARXMO_API narxmo_status narxmo_rank(const narxmo_archive* a, const char* method, const int* objective_ranks,
                                     size_t n_ranks, double intensity, size_t top, const char* csv_path,
                                     char** json_out);

/* Refines every archive structure and tallies outcome labels against the
 * true structure of `system`. */
NARXMO_API narxmo_status narxmo_classify(const narxmo_archive* a, const char* system, const narxmo_dataset* d,
                                         double alpha, const char* csv_path, char** json_out);

/* Statistical tests on a numeric CSV with a header row.
 *   "friedman": rows are blocks, columns treatments
 *   "hommel":   Friedman followed by the post-hoc against a control column
 *   "wilcoxon": first two columns are the paired x and y
 * options_json may be NULL; keys: order ("smallest_first"|"largest_first"),
 * control (column index), alpha, alternative ("greater"|"two_sided"). */
NARXMO_API narxmo_status narxmo_stats(const char* csv_path, const char* test, const char* options_json,
                                      char** json_out);

/* First-order frequency response over n_points in [0, fs/2]. */
NARXMO_API narxmo_status narxmo_frf(const narxmo_model* m, double fs, size_t n_points, const char* csv_path,
                                    char** json_out);

#ifdef __cplusplus
}
#endif

#endif
