/* Public C interface to the multimodal fusion runtime.
 *
 * Every object is an opaque handle created by a *_parse/_load/_default call
 * and released by the matching *_free. Functions return MMF_OK or an error
 * code; mmf_last_error() describes the most recent failure on the calling
 * thread. Strings returned through char** are heap-allocated; release them
 * with mmf_string_free.
 */
#ifndef MMF_MMF_H
#define MMF_MMF_H

#include <stdint.h>

#if defined(_WIN32)
#define MMF_API __declspec(dllexport)
#else
#define MMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmf_status {
    MMF_OK = 0,
    MMF_ERR_INVALID_ARG = 1,
    MMF_ERR_PARSE = 2,
    MMF_ERR_VALIDATION = 3,
    MMF_ERR_IO = 4,
    MMF_ERR_STATE = 5,
    MMF_ERR_INTERNAL = 6,
} mmf_status;

/* Message for the last failing call on this thread ("" when none). */
MMF_API const char* mmf_last_error(void);
MMF_API const char* mmf_version(void);
MMF_API void mmf_string_free(char* s);

typedef struct mmf_config mmf_config;
typedef struct mmf_scene mmf_scene;
typedef struct mmf_profiles mmf_profiles;
typedef struct mmf_trace mmf_trace;

/* runtime configuration (tier combo + runtime knobs), JSON in and out */
MMF_API mmf_status mmf_config_default(mmf_config** out);
MMF_API mmf_status mmf_config_parse(const char* json_text, mmf_config** out);
MMF_API mmf_status mmf_config_serialize(const mmf_config* cfg, char** out_text);
MMF_API void mmf_config_free(mmf_config* cfg);

/* scene contexts: "A", "B", or a path to a scene JSON file */
MMF_API mmf_status mmf_scene_load(const char* name_or_path, mmf_scene** out);
MMF_API mmf_status mmf_scene_serialize(const mmf_scene* scene, char** out_text);
MMF_API void mmf_scene_free(mmf_scene* scene);

/* calibrated engine profiles */
MMF_API mmf_status mmf_profiles_default(mmf_profiles** out);
MMF_API mmf_status mmf_profiles_load(const char* path, mmf_profiles** out);
MMF_API mmf_status mmf_profiles_parse(const char* json_text, mmf_profiles** out);
MMF_API mmf_status mmf_profiles_serialize(const mmf_profiles* p, char** out_text);
MMF_API void mmf_profiles_free(mmf_profiles* p);

/* interaction traces; op is locate / describe / describe_ambiguous / zoom /
 * capture, options_json tweaks generation (NULL for defaults; see README) */
MMF_API mmf_status mmf_trace_parse(const char* text, mmf_trace** out);
MMF_API mmf_status mmf_trace_generate(const char* op, const mmf_scene* scene, int n,
                                      uint64_t seed, const char* options_json,
                                      mmf_trace** out);
MMF_API mmf_status mmf_trace_serialize(const mmf_trace* trace, char** out_text);
MMF_API void mmf_trace_free(mmf_trace* trace);

/* Replays a trace through the simulated pipeline; returns a JSON document
 * with per-interaction outcomes, stage breakdowns and summary stats. */
MMF_API mmf_status mmf_run_trial(const mmf_config* cfg, const mmf_profiles* profiles,
                                 const mmf_scene* scene, const mmf_trace* trace,
                                 uint64_t seed, char** out_json);

/* Full tier-combination study. contexts_csv like "A,B", ops_csv like
 * "locate,describe". Writes cells.csv + sweep.json into out_dir when
 * out_dir is non-NULL; always returns the cells CSV text. */
MMF_API mmf_status mmf_sweep(const char* contexts_csv, const char* ops_csv, int n,
                             uint64_t seed, int jobs, const mmf_profiles* profiles,
                             const char* out_dir, char** out_cells_csv);

/* Fits the free profile parameters against a measurement table (CSV path).
 * start may be NULL for defaults. Writes the fitted profile JSON to
 * out_profile_path when non-NULL; returns a JSON summary (loss, warnings,
 * fitted parameters). */
MMF_API mmf_status mmf_calibrate(const char* targets_csv_path, const mmf_profiles* start,
                                 int max_evaluations, const char* out_profile_path,
                                 char** out_summary_json);

/* Renders the tradeoff report (trend checks + recommendations) for a cells
 * CSV produced by mmf_sweep. */
MMF_API mmf_status mmf_report(const char* cells_csv_text, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* MMF_MMF_H */
