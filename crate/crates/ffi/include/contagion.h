#ifndef CONTAGION_H
#define CONTAGION_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ContagionStatus {
  CONTAGION_STATUS_OK = 0,
  CONTAGION_STATUS_NULL_POINTER = 1,
  CONTAGION_STATUS_INVALID_UTF8 = 2,
  CONTAGION_STATUS_INVALID_ARGUMENT = 3,
  CONTAGION_STATUS_PROTOCOL_VIOLATION = 4,
  CONTAGION_STATUS_CONFIGURATION = 5,
  CONTAGION_STATUS_PARSE = 6,
  CONTAGION_STATUS_INSUFFICIENT_HISTORY = 7,
  CONTAGION_STATUS_IO = 8,
  CONTAGION_STATUS_OUT_OF_RANGE = 9,
  CONTAGION_STATUS_PANIC = 10,
} ContagionStatus;

typedef struct ContagionLexicon ContagionLexicon;

/**
 * Parsed, validated scenario.
 */
typedef struct ContagionScenario ContagionScenario;

/**
 * Completed run.
 */
typedef struct ContagionTrace ContagionTrace;

typedef struct ContagionEmotionVector {
  double joy;
  double sadness;
  double anger;
  double fear;
  double neutral;
  double valence;
  double intensity;
} ContagionEmotionVector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread; do not free.
 */
const char *contagion_last_error(void);

/**
 * Static version string; do not free.
 */
const char *contagion_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void contagion_string_free(char *s);

/**
 * Parse a scenario document. `base_dir` (nullable) resolves relative paths
 * such as the lexicon; null means the current directory.
 *
 * # Safety
 * `json` and `base_dir` must be null or NUL-terminated; `out` must be writable.
 */
enum ContagionStatus contagion_scenario_from_json(const char *json,
                                                  const char *base_dir,
                                                  struct ContagionScenario **out);

/**
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum ContagionStatus contagion_scenario_from_file(const char *path, struct ContagionScenario **out);

/**
 * # Safety
 * `scenario` must be a live handle.
 */
enum ContagionStatus contagion_scenario_set_seed(struct ContagionScenario *scenario, uint64_t seed);

/**
 * # Safety
 * `scenario` must be a live handle.
 */
enum ContagionStatus contagion_scenario_set_orchestration(struct ContagionScenario *scenario,
                                                          bool enabled);

/**
 * Scenario as canonical JSON.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum ContagionStatus contagion_scenario_to_json(const struct ContagionScenario *scenario,
                                                char **out);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void contagion_scenario_free(struct ContagionScenario *scenario);

/**
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum ContagionStatus contagion_run(const struct ContagionScenario *scenario,
                                   struct ContagionTrace **out);

/**
 * Number of recorded steps, 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t contagion_trace_step_count(const struct ContagionTrace *trace);

/**
 * Number of humans, 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t contagion_trace_human_count(const struct ContagionTrace *trace);

/**
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t contagion_trace_total_interventions(const struct ContagionTrace *trace);

/**
 * Copy the valences after `step` into `buf`, which must hold `len` values.
 * `len` must be at least the human count.
 *
 * # Safety
 * `trace` must be a live handle; `buf` must point to `len` writable doubles.
 */
enum ContagionStatus contagion_trace_valences(const struct ContagionTrace *trace,
                                              size_t step,
                                              double *buf,
                                              size_t len);

/**
 * # Safety
 * `trace` must be a live handle; `out` must be writable.
 */
enum ContagionStatus contagion_trace_mean_valence(const struct ContagionTrace *trace,
                                                  size_t step,
                                                  double *out);

/**
 * One JSON object per step, newline separated.
 *
 * # Safety
 * `trace` must be a live handle; `out` must be writable.
 */
enum ContagionStatus contagion_trace_to_jsonl(const struct ContagionTrace *trace, char **out);

/**
 * # Safety
 * `trace` must be a live handle; `out` must be writable.
 */
enum ContagionStatus contagion_trace_summary_json(const struct ContagionTrace *trace, char **out);

/**
 * Write metrics.csv, trace.jsonl, summary.json and policy.json into `dir`.
 *
 * # Safety
 * `trace` must be a live handle; `dir` must be NUL-terminated.
 */
enum ContagionStatus contagion_trace_emit(const struct ContagionTrace *trace, const char *dir);

/**
 * # Safety
 * `trace` must be null or a handle not yet freed.
 */
void contagion_trace_free(struct ContagionTrace *trace);

struct ContagionLexicon *contagion_lexicon_builtin(void);

/**
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum ContagionStatus contagion_lexicon_from_file(const char *path, struct ContagionLexicon **out);

/**
 * # Safety
 * `lexicon` must be null or a handle not yet freed.
 */
void contagion_lexicon_free(struct ContagionLexicon *lexicon);

/**
 * Sentiment of raw text in [-1, 1].
 *
 * # Safety
 * `lexicon` must be a live handle, `utterance` NUL-terminated, `out` writable.
 */
enum ContagionStatus contagion_score_sentiment(const struct ContagionLexicon *lexicon,
                                               const char *utterance,
                                               double *out);

/**
 * # Safety
 * `lexicon` must be a live handle, `utterance` NUL-terminated, `out` writable.
 */
enum ContagionStatus contagion_detect_emotions(const struct ContagionLexicon *lexicon,
                                               const char *utterance,
                                               struct ContagionEmotionVector *out);

/**
 * Analyze a JSONL transcript and return the report as JSON.
 *
 * # Safety
 * `path` must be NUL-terminated, `lexicon` a live handle, `out` writable.
 */
enum ContagionStatus contagion_analyze_transcript(const char *path,
                                                  const struct ContagionLexicon *lexicon,
                                                  char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTAGION_H */
