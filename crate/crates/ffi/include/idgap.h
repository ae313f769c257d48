#ifndef IDGAP_H
#define IDGAP_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum IdgapStatus {
  IDGAP_STATUS_OK = 0,
  IDGAP_STATUS_NULL_POINTER = 1,
  IDGAP_STATUS_INVALID_UTF8 = 2,
  IDGAP_STATUS_PARSE = 3,
  IDGAP_STATUS_STRUCTURAL = 4,
  IDGAP_STATUS_PARAMETER = 5,
  IDGAP_STATUS_RANGE = 6,
  IDGAP_STATUS_METRIC = 7,
  IDGAP_STATUS_IO = 8,
  IDGAP_STATUS_SIMULATION = 9,
  IDGAP_STATUS_PANIC = 10,
} IdgapStatus;

/**
 * Grounded identity.
 */
typedef struct IdgapIdentity IdgapIdentity;

/**
 * Metrics report.
 */
typedef struct IdgapReport IdgapReport;

/**
 * Incremental persistence over pushed steps.
 */
typedef struct IdgapStream IdgapStream;

/**
 * Activation-set sequence.
 */
typedef struct IdgapTrace IdgapTrace;

/**
 * Metric thresholds; see `idgap_default_params`.
 */
typedef struct IdgapParams {
  double delta_i;
  double delta_cons;
  double epsilon;
  double alpha;
  size_t ref_index;
} IdgapParams;

/**
 * Window and metric settings. A null `eval` selects every valid layer time.
 */
typedef struct IdgapWindow {
  size_t horizon;
  size_t stride;
  size_t horizon_max;
  const size_t *eval;
  size_t eval_len;
} IdgapWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Caller frees it.
 */
char *idgap_last_error(void);

void idgap_string_free(char *s);

struct IdgapParams idgap_default_params(void);

/**
 * Parses an identity spec (JSON document or JSON lines).
 */
enum IdgapStatus idgap_identity_parse(const char *text, struct IdgapIdentity **out);

size_t idgap_identity_k(const struct IdgapIdentity *identity);

void idgap_identity_free(struct IdgapIdentity *identity);

/**
 * Empty trace over `k` ingredients.
 */
enum IdgapStatus idgap_trace_new(size_t k, struct IdgapTrace **out);

/**
 * Parses a JSON-lines trace in either form against `identity`.
 */
enum IdgapStatus idgap_trace_parse(const char *text,
                                   const struct IdgapIdentity *identity,
                                   struct IdgapTrace **out);

/**
 * Appends one step whose active ingredients are `active[0..n]`.
 */
enum IdgapStatus idgap_trace_push(struct IdgapTrace *trace, const size_t *active, size_t n);

size_t idgap_trace_len(const struct IdgapTrace *trace);

void idgap_trace_free(struct IdgapTrace *trace);

/**
 * Weak and strong persistence.
 */
enum IdgapStatus idgap_persistence(const struct IdgapTrace *trace,
                                   const struct IdgapIdentity *identity,
                                   const struct IdgapWindow *window,
                                   double *p_weak,
                                   double *p_strong);

/**
 * Full analysis: persistence, gap ratio, identifiability and continuity.
 */
enum IdgapStatus idgap_analyze(const struct IdgapTrace *trace,
                               const struct IdgapIdentity *identity,
                               const struct IdgapWindow *window,
                               const struct IdgapParams *params,
                               struct IdgapReport **out);

double idgap_report_p_weak(const struct IdgapReport *report);

double idgap_report_p_strong(const struct IdgapReport *report);

/**
 * Gap ratio; `INFINITY` when unbounded, `IDGAP_STATUS_METRIC` when undefined.
 */
enum IdgapStatus idgap_report_gap_ratio(const struct IdgapReport *report, double *out);

/**
 * Report as fixed-layout JSON. Caller frees it.
 */
char *idgap_report_json(const struct IdgapReport *report);

void idgap_report_free(struct IdgapReport *report);

/**
 * Streaming persistence. `window->eval` must be non-null: a stream has no
 * length to resolve "every valid layer time" against.
 */
enum IdgapStatus idgap_stream_new(size_t k,
                                  const struct IdgapWindow *window,
                                  struct IdgapStream **out);

enum IdgapStatus idgap_stream_push(struct IdgapStream *stream, const size_t *active, size_t n);

/**
 * Closes the stream and reports its scores. The handle must still be freed.
 */
enum IdgapStatus idgap_stream_finish(struct IdgapStream *stream, double *p_weak, double *p_strong);

void idgap_stream_free(struct IdgapStream *stream);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IDGAP_H */
