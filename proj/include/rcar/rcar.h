#ifndef RCAR_RCAR_H
#define RCAR_RCAR_H

/* C interface to the RCAR Metropolis-Hastings library.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * fallible call returns an rcar_status; on failure rcar_last_error() gives a
 * message for the calling thread. Strings returned by accessors stay valid
 * until the owning handle is destroyed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RCAR_BUILDING_LIBRARY)
#    define RCAR_API __declspec(dllexport)
#  else
#    define RCAR_API __declspec(dllimport)
#  endif
#else
#  define RCAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rcar_status {
  RCAR_OK = 0,
  RCAR_INVALID_ARGUMENT = 1,
  RCAR_CONFIG_ERROR = 2,
  RCAR_IO_ERROR = 3,
  RCAR_NUMERIC_ERROR = 4,
  RCAR_INTERNAL_ERROR = 5
} rcar_status;

typedef struct rcar_config rcar_config;
typedef struct rcar_report rcar_report;

RCAR_API const char *rcar_version(void);
RCAR_API const char *rcar_status_string(rcar_status status);
/* Message of the last failed call on this thread; empty if none. */
RCAR_API const char *rcar_last_error(void);

/* Configuration with every key at its default. */
RCAR_API rcar_status rcar_config_create(rcar_config **out);
RCAR_API rcar_status rcar_config_load_file(rcar_config *cfg, const char *path);
RCAR_API rcar_status rcar_config_load_string(rcar_config *cfg, const char *text);
/* name is "section.key". */
RCAR_API rcar_status rcar_config_set(rcar_config *cfg, const char *name, const char *value);
RCAR_API rcar_status rcar_config_get(const rcar_config *cfg, const char *name, const char **value);
RCAR_API void rcar_config_destroy(rcar_config *cfg);
/* Every key with its default and a one-line description. */
RCAR_API const char *rcar_config_help(void);

/* Number of experiments and their names. */
RCAR_API size_t rcar_experiment_count(void);
RCAR_API const char *rcar_experiment_name(size_t index);

/* Runs one experiment. replicas = 0 selects the experiment default; threads
 * only affects wall time. out_dir may be NULL to skip writing files. */
RCAR_API rcar_status rcar_experiment_run(const char *name, const rcar_config *cfg, uint64_t seed,
                                         size_t replicas, size_t threads, const char *out_dir,
                                         rcar_report **out);

RCAR_API const char *rcar_report_summary_json(const rcar_report *report);
RCAR_API size_t rcar_report_csv_count(const rcar_report *report);
RCAR_API const char *rcar_report_csv_name(const rcar_report *report, size_t index);
RCAR_API const char *rcar_report_csv_text(const rcar_report *report, size_t index);
/* 1 when every verdict in the summary holds, 0 otherwise. */
RCAR_API int rcar_report_passed(const rcar_report *report);
RCAR_API void rcar_report_destroy(rcar_report *report);

/* Synthetic observation data for the SSL potential, as x,y CSV. */
RCAR_API rcar_status rcar_generate_data(const rcar_config *cfg, const char *path);

/* min(1, exp(psi_u - psi_v)). */
RCAR_API rcar_status rcar_acceptance_prob(double psi_u, double psi_v, double *out);
RCAR_API rcar_status rcar_h1_norm(const double *coeffs, size_t n, double *out);
RCAR_API rcar_status rcar_evaluate_at(const double *coeffs, size_t n, double x, double *out);

#ifdef __cplusplus
}
#endif

#endif
