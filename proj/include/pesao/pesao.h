#ifndef PESAO_H
#define PESAO_H

/* C interface to the simulator. Every call returns a status; on failure
 * pesao_last_error() holds a message for the calling thread. Strings
 * returned through char** are malloc'd and released with pesao_free_string. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PESAO_API __declspec(dllexport)
#else
#define PESAO_API __attribute__((visibility("default")))
#endif

typedef enum pesao_status {
  PESAO_OK = 0,
  PESAO_E_INVALID_ARGUMENT = 1,
  PESAO_E_IO = 2,
  PESAO_E_PARSE = 3,
  PESAO_E_VALIDATION = 4,
  PESAO_E_GENERATION_EXHAUSTED = 5,
  PESAO_E_UNBOUND_PARAMETER = 6,
  PESAO_E_CONFIGURATION = 7,
  PESAO_E_INCOMPLETE = 8,
  PESAO_E_INTERNAL = 99
} pesao_status;

typedef enum pesao_answer { PESAO_SAME = 0, PESAO_DIFFERENT = 1 } pesao_answer;

typedef struct pesao_library pesao_library;
typedef struct pesao_trace pesao_trace;

typedef struct pesao_metrics {
  int fixations;
  double head_movement_m;
  double response_time_s;
} pesao_metrics;

PESAO_API const char* pesao_version(void);
PESAO_API const char* pesao_last_error(void);
PESAO_API const char* pesao_status_name(pesao_status s);
PESAO_API void pesao_free_string(char* s);

/* object libraries */
PESAO_API pesao_status pesao_library_generate(uint64_t seed, pesao_library** out);
/* Rebuilds each object from its recorded class and seed; the voxels in the
 * file must match. */
PESAO_API pesao_status pesao_library_read(const char* path, pesao_library** out);
PESAO_API pesao_status pesao_library_write(const pesao_library* lib, const char* path);
PESAO_API pesao_status pesao_library_text(const pesao_library* lib, char** out);
PESAO_API size_t pesao_library_size(const pesao_library* lib);
/* start, complexity, orientation: -1 for any. start 0 long, 1 corner,
 * 2 short; complexity 0 easy, 1 medium, 2 hard; orientation in degrees. */
PESAO_API pesao_status pesao_library_count_configurations(const pesao_library* lib, int start, int complexity,
                                                          int orientation, uint64_t* out);
PESAO_API void pesao_library_free(pesao_library* lib);

/* size of the quantized state space at the default quanta */
PESAO_API uint64_t pesao_state_space_size(void);

/* trials: trial_line is a trial config line; strategy_path may be NULL for
 * the built-in strategy library */
PESAO_API pesao_status pesao_run_trial(const pesao_library* lib, const char* trial_line,
                                       const char* strategy_path, int noise, uint64_t seed,
                                       pesao_trace** out, pesao_answer* answer);

PESAO_API pesao_status pesao_trace_read(const char* path, pesao_trace** out);
PESAO_API pesao_status pesao_trace_write(const pesao_trace* trace, const char* path);
PESAO_API pesao_status pesao_trace_text(const pesao_trace* trace, char** out);
PESAO_API pesao_status pesao_trace_metrics(const pesao_trace* trace, pesao_metrics* out);
PESAO_API void pesao_trace_free(pesao_trace* trace);

/* batch operations */

/* Runs a plan file. If override_seed is nonzero, master_seed replaces the
 * plan's. Writes results.tsv and traces/ into out_dir. Per-trial failures do
 * not stop the batch; their count goes to *failed (may be NULL). */
PESAO_API pesao_status pesao_run_experiment(const char* plan_path, int override_seed, uint64_t master_seed,
                                            const char* out_dir, int* trials, int* failed);
PESAO_API pesao_status pesao_mine(const char* trace_dir, double min_support, const char* out_dir, int* mined);
/* Reads results.tsv from results_dir and writes summaries and plots. */
PESAO_API pesao_status pesao_report(const char* results_dir, const char* out_dir);
/* PESAO_OUT_DIR overrides requested when set. */
PESAO_API pesao_status pesao_resolve_out_dir(const char* requested, char** out);

#ifdef __cplusplus
}
#endif

#endif
