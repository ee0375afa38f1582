#ifndef H1DIFF_H
#define H1DIFF_H

/* C interface to the h1diff library.
 *
 * All objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an h1diff_status; on failure a message is kept
 * per thread and can be read with h1diff_last_error() until the next call on
 * that thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(H1DIFF_BUILDING)
#    define H1DIFF_API __declspec(dllexport)
#  else
#    define H1DIFF_API __declspec(dllimport)
#  endif
#else
#  define H1DIFF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum h1diff_status {
  H1DIFF_OK = 0,
  H1DIFF_ERR_INVALID_ARGUMENT = 1,
  H1DIFF_ERR_INVALID_CONFIG = 2,
  H1DIFF_ERR_BREAKDOWN = 3,
  H1DIFF_ERR_NUMERICAL = 4,
  H1DIFF_ERR_IO = 5,
  H1DIFF_ERR_BUFFER_TOO_SMALL = 6,
  H1DIFF_ERR_INTERNAL = 7
} h1diff_status;

typedef struct h1diff_config h1diff_config;
typedef struct h1diff_summary h1diff_summary;
typedef struct h1diff_field h1diff_field;

H1DIFF_API const char* h1diff_version(void);
H1DIFF_API const char* h1diff_status_string(h1diff_status status);
/* Message of the last failed call on this thread, "" after a success. */
H1DIFF_API const char* h1diff_last_error(void);

H1DIFF_API size_t h1diff_preset_count(void);
/* NULL when index is out of range. */
H1DIFF_API const char* h1diff_preset_name(size_t index);

/* ---- experiment configs ------------------------------------------------ */

/* On H1DIFF_ERR_INVALID_CONFIG, h1diff_last_error() lists one
 * "key.path: message" entry per line. */
H1DIFF_API h1diff_status h1diff_config_parse(const char* json_text, h1diff_config** out);
H1DIFF_API h1diff_status h1diff_config_load(const char* path, h1diff_config** out);
H1DIFF_API h1diff_status h1diff_config_set_output_dir(h1diff_config* config, const char* dir);
H1DIFF_API const char* h1diff_config_output_dir(const h1diff_config* config);
H1DIFF_API const char* h1diff_config_preset(const h1diff_config* config);
/* Canonical JSON with defaults filled in. Writes at most capacity bytes
 * including the terminator; *required (if non-NULL) receives the full size. */
H1DIFF_API h1diff_status h1diff_config_to_json(const h1diff_config* config, char* buffer, size_t capacity,
                                               size_t* required);
H1DIFF_API void h1diff_config_free(h1diff_config* config);

/* ---- runs -------------------------------------------------------------- */

typedef struct h1diff_invariant {
  const char* name;       /* valid while the summary is alive */
  double value;
  double threshold;
  const char* comparison; /* "<=", ">=", ">", "==" */
  int passed;
  int hard;
  const char* note;
} h1diff_invariant;

/* A run whose invariants fail still returns H1DIFF_OK; inspect
 * h1diff_summary_passed(). */
H1DIFF_API h1diff_status h1diff_run(const h1diff_config* config, h1diff_summary** out);
H1DIFF_API int h1diff_summary_passed(const h1diff_summary* summary);
H1DIFF_API double h1diff_summary_wall_time(const h1diff_summary* summary);
H1DIFF_API size_t h1diff_summary_invariant_count(const h1diff_summary* summary);
H1DIFF_API h1diff_status h1diff_summary_invariant(const h1diff_summary* summary, size_t index,
                                                  h1diff_invariant* out);
H1DIFF_API size_t h1diff_summary_file_count(const h1diff_summary* summary);
H1DIFF_API h1diff_status h1diff_summary_file(const h1diff_summary* summary, size_t index, const char** name,
                                             uint64_t* bytes, uint64_t* fnv1a64);
H1DIFF_API h1diff_status h1diff_summary_to_json(const h1diff_summary* summary, char* buffer, size_t capacity,
                                                size_t* required);
H1DIFF_API void h1diff_summary_free(h1diff_summary* summary);

/* ---- fields on T^1 / T^2 ----------------------------------------------- */

/* Spec text such as "0: 1*sin(1,0); 1: -0.5*cos(0,2)"; the field has dim
 * components. */
H1DIFF_API h1diff_status h1diff_field_from_spec(int dim, int n, const char* spec, h1diff_field** out);
H1DIFF_API h1diff_status h1diff_field_random_divergence_free(int n, uint64_t seed, int max_mode, double amplitude,
                                                             h1diff_field** out);
H1DIFF_API h1diff_status h1diff_field_random(int dim, int n, int components, uint64_t seed, int max_mode,
                                             double amplitude, h1diff_field** out);
H1DIFF_API int h1diff_field_dim(const h1diff_field* field);
H1DIFF_API int h1diff_field_n(const h1diff_field* field);
H1DIFF_API int h1diff_field_components(const h1diff_field* field);
/* Physical samples of one component, row-major, n^dim values. */
H1DIFF_API h1diff_status h1diff_field_samples(const h1diff_field* field, int component, double* out, size_t count);
H1DIFF_API h1diff_status h1diff_field_leray_project(const h1diff_field* field, h1diff_field** out);
H1DIFF_API h1diff_status h1diff_field_gradient_part(const h1diff_field* field, h1diff_field** out);
H1DIFF_API h1diff_status h1diff_field_h1_inner(const h1diff_field* x, const h1diff_field* y, double alpha,
                                               double* out);
H1DIFF_API h1diff_status h1diff_field_max_divergence(const h1diff_field* field, double* out);
H1DIFF_API void h1diff_field_free(h1diff_field* field);

/* ---- solvers ----------------------------------------------------------- */

/* Euler-alpha flow from u0 to t_end with fixed RK4 steps. max_energy_drift
 * (optional) receives max_t |E(t) - E(0)| / E(0). */
H1DIFF_API h1diff_status h1diff_flow_integrate(const h1diff_field* u0, double alpha, double dt, double t_end,
                                               h1diff_field** out, double* max_energy_drift);

typedef struct h1diff_curvature {
  double numerator;   /* <R(X,Y)Y, X>_1 */
  double gram;        /* |X|^2 |Y|^2 - <X,Y>^2 */
  double sectional;   /* numerator / gram when sectional_defined */
  int sectional_defined;
  int sign;           /* -1, 0, +1 under the library's tolerance */
} h1diff_curvature;

/* variant: "two_term", "six_term" or "kernel"; subgroup != 0 adds the Gauss
 * correction for the volume-preserving subgroup (specs must be
 * divergence-free). */
H1DIFF_API h1diff_status h1diff_sectional(int n, const char* x_spec, const char* y_spec, const char* variant,
                                          double alpha, int subgroup, h1diff_curvature* out);

/* Residual of the shear family eta_t(x) = (x1 + t h(x2), x2) with profile spec
 * h (one-dimensional, e.g. "0: 1*sin(2)"). */
H1DIFF_API h1diff_status h1diff_shear_geodesic_residual(int n, const char* profile, double t, double alpha,
                                                        double* out);

/* 1D geodesic from the identity with initial velocity spec; breakdown_time
 * receives -1 if the run reached t_end. */
H1DIFF_API h1diff_status h1diff_geodesic_1d(int n, const char* velocity_spec, double alpha, double dt, double t_end,
                                            double* energy_drift, double* breakdown_time);

#ifdef __cplusplus
}
#endif

#endif /* H1DIFF_H */
