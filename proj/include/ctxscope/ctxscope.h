#ifndef CTXSCOPE_H
#define CTXSCOPE_H

/* C interface to the ctxscope shared library.
 *
 * Every fallible call returns a ctxs_status; on failure a message is available
 * from ctxs_last_error() on the same thread until the next call. Objects are
 * opaque and released with the matching *_free function. Strings handed out
 * through char** parameters are released with ctxs_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CTXS_API __declspec(dllexport)
#else
#define CTXS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctxs_status {
    CTXS_OK = 0,
    CTXS_ERR_USAGE = 1,     /* invalid argument or flag combination */
    CTXS_ERR_INPUT = 2,     /* malformed or inconsistent input data */
    CTXS_ERR_IO = 3,        /* file could not be read or written */
    CTXS_ERR_UNDEFINED = 4, /* conditioning event of probability zero */
    CTXS_ERR_INTERNAL = 5   /* invariant violation or unexpected failure */
} ctxs_status;

typedef struct ctxs_dist ctxs_dist;
typedef struct ctxs_dataset ctxs_dataset;
typedef struct ctxs_options ctxs_options;
typedef struct ctxs_report ctxs_report;

CTXS_API const char* ctxs_version(void);
CTXS_API const char* ctxs_last_error(void);
CTXS_API const char* ctxs_status_name(ctxs_status status);
CTXS_API void ctxs_string_free(char* s);

/* Exact distributions */
CTXS_API ctxs_status ctxs_dist_load_csv(const char* path, ctxs_dist** out);
CTXS_API ctxs_status ctxs_dist_parse_csv(const char* text, ctxs_dist** out);
CTXS_API ctxs_status ctxs_dist_save_csv(const ctxs_dist* dist, const char* path);
CTXS_API ctxs_status ctxs_dist_to_csv(const ctxs_dist* dist, char** out);
CTXS_API ctxs_status ctxs_dist_digest(const ctxs_dist* dist, char** out);
CTXS_API size_t ctxs_dist_feature_count(const ctxs_dist* dist);
CTXS_API ctxs_status ctxs_dist_table2(ctxs_dist** out);
CTXS_API ctxs_status ctxs_dist_duplicate(const ctxs_dist* dist, size_t feature, ctxs_dist** out);
/* truth_json may be NULL. */
CTXS_API ctxs_status ctxs_dist_planted(const char* spec, uint64_t seed, int shuffle, ctxs_dist** out,
                                       char** truth_json);
CTXS_API void ctxs_dist_free(ctxs_dist* dist);

/* Datasets */
CTXS_API ctxs_status ctxs_dataset_load_csv(const char* path, ctxs_dataset** out);
CTXS_API ctxs_status ctxs_dataset_parse_csv(const char* text, ctxs_dataset** out);
CTXS_API ctxs_status ctxs_dataset_save_csv(const ctxs_dataset* data, const char* path);
CTXS_API ctxs_status ctxs_dataset_to_csv(const ctxs_dataset* data, char** out);
CTXS_API size_t ctxs_dataset_size(const ctxs_dataset* data);
CTXS_API ctxs_status ctxs_sample(const ctxs_dist* dist, uint64_t n, uint64_t seed, ctxs_dataset** out);
CTXS_API void ctxs_dataset_free(ctxs_dataset* data);

/* Analysis options. Unset comparison settings take their defaults: exact mode
 * for distributions; confidence 0.95 and min support 5 for datasets. */
CTXS_API ctxs_status ctxs_options_new(ctxs_options** out);
CTXS_API void ctxs_options_free(ctxs_options* options);
CTXS_API ctxs_status ctxs_options_set_epsilon(ctxs_options* options, const char* literal);
CTXS_API ctxs_status ctxs_options_set_confidence(ctxs_options* options, double confidence);
CTXS_API ctxs_status ctxs_options_set_min_support(ctxs_options* options, uint64_t min_support);
CTXS_API ctxs_status ctxs_options_set_bonferroni(ctxs_options* options, int enabled);
CTXS_API ctxs_status ctxs_options_set_laplace(ctxs_options* options, int enabled);
CTXS_API ctxs_status ctxs_options_set_exact_limit(ctxs_options* options, size_t limit);
CTXS_API ctxs_status ctxs_options_set_max_context(ctxs_options* options, size_t size);
CTXS_API ctxs_status ctxs_options_set_beam(ctxs_options* options, size_t width);
CTXS_API ctxs_status ctxs_options_set_probes(ctxs_options* options, size_t probes);
CTXS_API ctxs_status ctxs_options_set_seed(ctxs_options* options, uint64_t seed);
CTXS_API ctxs_status ctxs_options_set_threads(ctxs_options* options, size_t threads);
/* Recorded verbatim in the report; timestamp may be NULL. */
CTXS_API ctxs_status ctxs_options_set_manifest(ctxs_options* options, const char* command, const char* const* args,
                                               size_t arg_count, const char* timestamp);

/* Analysis. Comparison settings for empirical data are rejected for exact
 * distributions; an explicit epsilon of 0 on a dataset runs exact comparisons
 * on the counts. */
CTXS_API ctxs_status ctxs_analyze_dist(const ctxs_dist* dist, const ctxs_options* options, ctxs_report** out);
CTXS_API ctxs_status ctxs_analyze_dataset(const ctxs_dataset* data, const ctxs_options* options, ctxs_report** out);
CTXS_API ctxs_status ctxs_report_json(const ctxs_report* report, char** out);
/* format: "json", "md" or "text" */
CTXS_API ctxs_status ctxs_report_render(const ctxs_report* report, const char* format, char** out);
CTXS_API ctxs_status ctxs_render_report_text(const char* report_json, const char* format, char** out);
CTXS_API void ctxs_report_free(ctxs_report* report);

#ifdef __cplusplus
}
#endif

#endif
