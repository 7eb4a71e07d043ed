#ifndef SP2GEO_H
#define SP2GEO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum Sp2Status {
  SP2_STATUS_OK = 0,
  SP2_STATUS_NULL_POINTER = 1,
  SP2_STATUS_INVALID_ARGUMENT = 2,
  SP2_STATUS_NOT_ON_MANIFOLD = 3,
  SP2_STATUS_DRIFT_EXCEEDED = 4,
  SP2_STATUS_UNSUPPORTED = 5,
  // The run completed and its report is available, but a check failed.
  SP2_STATUS_CHECK_FAILED = 6,
  SP2_STATUS_PANIC = 7,
} Sp2Status;

// Hamiltonian that drives a geodesic.
typedef enum Sp2Kind {
  // Sub-Riemannian on `D_H` upstairs, on `D` downstairs.
  SP2_KIND_SUB_RIEMANNIAN = 0,
  // Sub-Riemannian on `D_K`; upstairs only.
  SP2_KIND_DISTRIBUTION_K = 1,
  // Riemannian on `Sp(2)` upstairs, on `S^7` downstairs.
  SP2_KIND_RIEMANNIAN = 2,
} Sp2Kind;

// A point of `Sp(2)`.
typedef struct Sp2Point Sp2Point;

// A sampled geodesic.
typedef struct Sp2Trace Sp2Trace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the next call
// on the same thread; do not free.
const char *sp2_last_error(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void sp2_string_free(char *s);

// The identity matrix.
//
// # Safety
// `out` must be writable.
enum Sp2Status sp2_point_identity(struct Sp2Point **out);

// A point from 16 reals: entries a, b, c, d, each as `w, x, y, z`.
// Matrices within `1e-4` of `Sp(2)` are polished onto it.
//
// # Safety
// `reals` must point to 16 doubles; `out` must be writable.
enum Sp2Status sp2_point_from_reals(const double *reals, struct Sp2Point **out);

// `exp(Σ c_i e_i)` over the standard orthonormal frame of `sp(2)`.
//
// # Safety
// `coeffs` must point to 10 doubles; `out` must be writable.
enum Sp2Status sp2_point_exp(const double *coeffs, struct Sp2Point **out);

// # Safety
// `point` must be a live handle; `out` must have room for 16 doubles.
enum Sp2Status sp2_point_to_reals(const struct Sp2Point *point, double *out);

// `π_K`: the second column, 8 reals `b, d`.
//
// # Safety
// `point` must be a live handle; `out` must have room for 8 doubles.
enum Sp2Status sp2_project_s7(const struct Sp2Point *point, double *out);

// `π_H` into `S^4 ⊂ H ⊕ R`, 5 reals.
//
// # Safety
// `point` must be a live handle; `out` must have room for 5 doubles.
enum Sp2Status sp2_project_s4(const struct Sp2Point *point, double *out);

// Null is ignored.
//
// # Safety
// `point` must be null or a live handle.
void sp2_point_free(struct Sp2Point *point);

// Integrates a normal geodesic from `point` with RK4 and retraction.
//
// `upstairs` selects `Sp(2)` with 10 momentum components, otherwise `S^7` with 7 (the
// start is `π_K(point)`, with the frame pushed forward from `point`).
//
// # Safety
// `point` must be a live handle, `momentum` must point to `momentum_len` doubles and
// `out` must be writable.
enum Sp2Status sp2_geodesic(const struct Sp2Point *point,
                            bool upstairs,
                            const double *momentum,
                            size_t momentum_len,
                            enum Sp2Kind kind,
                            double step,
                            double horizon,
                            struct Sp2Trace **out);

// Number of samples, or 0 for null.
//
// # Safety
// `trace` must be null or a live handle.
size_t sp2_trace_len(const struct Sp2Trace *trace);

// Reals per sample point: 16 upstairs, 8 downstairs; 0 for null.
//
// # Safety
// `trace` must be null or a live handle.
size_t sp2_trace_point_dim(const struct Sp2Trace *trace);

// Time, point and energy of sample `index`. `point_out` needs
// [`sp2_trace_point_dim`] doubles; either output may be null.
//
// # Safety
// `trace` must be a live handle; non-null outputs must be writable.
enum Sp2Status sp2_trace_sample(const struct Sp2Trace *trace,
                                size_t index,
                                double *time_out,
                                double *point_out,
                                double *energy_out);

// Largest energy and constraint deviation along the trace; either output may be null.
//
// # Safety
// `trace` must be a live handle; non-null outputs must be writable.
enum Sp2Status sp2_trace_drift(const struct Sp2Trace *trace,
                               double *energy_out,
                               double *constraint_out);

// The trace as CSV; free with [`sp2_string_free`].
//
// # Safety
// `trace` must be a live handle; `out` must be writable.
enum Sp2Status sp2_trace_csv(const struct Sp2Trace *trace, char **out);

// Null is ignored.
//
// # Safety
// `trace` must be null or a live handle.
void sp2_trace_free(struct Sp2Trace *trace);

// Runs a verification suite (`"prop2"`, `"theorem1"`, ..., `"all"`) on `"hopf"` or
// `"gromoll-meyer"`. `samples == 0` uses the suite default. Writes the JSON report to
// `json_out` (free with [`sp2_string_free`]) for both `SP2_STATUS_OK` and
// `SP2_STATUS_CHECK_FAILED`.
//
// # Safety
// `suite` and `bundle` must be nul-terminated strings; `json_out` must be writable.
enum Sp2Status sp2_verify(const char *suite,
                          const char *bundle,
                          size_t samples,
                          uint64_t seed,
                          char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SP2GEO_H */
