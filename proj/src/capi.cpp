#include "rcar/rcar.h"

#include "config.hpp"
#include "experiments.hpp"
#include "experiments_common.hpp"
#include "function_space.hpp"
#include "mh_core.hpp"
#include "report.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

struct rcar_config {
  rcar::Config cfg;
};

struct rcar_report {
  std::string summary;
  std::vector<std::string> names;
  std::vector<std::string> texts;
  bool passed = false;
};

namespace {

thread_local std::string last_error;

template <class Fn> rcar_status guarded(Fn &&fn) {
  try {
    last_error.clear();
    fn();
    return RCAR_OK;
  } catch (const rcar::ConfigError &e) {
    last_error = e.what();
    return RCAR_CONFIG_ERROR;
  } catch (const rcar::IoError &e) {
    last_error = e.what();
    return RCAR_IO_ERROR;
  } catch (const std::filesystem::filesystem_error &e) {
    last_error = e.what();
    return RCAR_IO_ERROR;
  } catch (const std::invalid_argument &e) {
    last_error = e.what();
    return RCAR_INVALID_ARGUMENT;
  } catch (const std::domain_error &e) {
    last_error = e.what();
    return RCAR_NUMERIC_ERROR;
  } catch (const std::range_error &e) {
    last_error = e.what();
    return RCAR_NUMERIC_ERROR;
  } catch (const std::overflow_error &e) {
    last_error = e.what();
    return RCAR_NUMERIC_ERROR;
  } catch (const std::exception &e) {
    last_error = e.what();
    return RCAR_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown error";
    return RCAR_INTERNAL_ERROR;
  }
}

void require(bool ok, const char *what) {
  if (!ok)
    throw std::invalid_argument(what);
}

rcar::FieldVector to_field(const double *coeffs, size_t n) {
  require(coeffs != nullptr || n == 0, "coeffs is null");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i)
    v[static_cast<Eigen::Index>(i)] = coeffs[i];
  return rcar::FieldVector(std::move(v));
}

} // namespace

extern "C" {

const char *rcar_version(void) { return "0.1.0"; }

const char *rcar_status_string(rcar_status status) {
  switch (status) {
  case RCAR_OK:
    return "ok";
  case RCAR_INVALID_ARGUMENT:
    return "invalid argument";
  case RCAR_CONFIG_ERROR:
    return "configuration error";
  case RCAR_IO_ERROR:
    return "i/o error";
  case RCAR_NUMERIC_ERROR:
    return "numeric error";
  case RCAR_INTERNAL_ERROR:
    return "internal error";
  }
  return "unknown status";
}

const char *rcar_last_error(void) { return last_error.c_str(); }

rcar_status rcar_config_create(rcar_config **out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new rcar_config{};
  });
}

rcar_status rcar_config_load_file(rcar_config *cfg, const char *path) {
  return guarded([&] {
    require(cfg && path, "null argument");
    cfg->cfg = rcar::Config::from_file(path);
  });
}

rcar_status rcar_config_load_string(rcar_config *cfg, const char *text) {
  return guarded([&] {
    require(cfg && text, "null argument");
    rcar::Config next = cfg->cfg;
    next.merge_text(text);
    cfg->cfg = std::move(next);
  });
}

rcar_status rcar_config_set(rcar_config *cfg, const char *name, const char *value) {
  return guarded([&] {
    require(cfg && name && value, "null argument");
    cfg->cfg.set(name, value);
  });
}

rcar_status rcar_config_get(const rcar_config *cfg, const char *name, const char **value) {
  return guarded([&] {
    require(cfg && name && value, "null argument");
    *value = cfg->cfg.raw(name).c_str();
  });
}

void rcar_config_destroy(rcar_config *cfg) { delete cfg; }

const char *rcar_config_help(void) {
  static const std::string help = rcar::config_help();
  return help.c_str();
}

size_t rcar_experiment_count(void) { return rcar::experiment_names().size(); }

const char *rcar_experiment_name(size_t index) {
  const auto &names = rcar::experiment_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

rcar_status rcar_experiment_run(const char *name, const rcar_config *cfg, uint64_t seed, size_t replicas,
                                size_t threads, const char *out_dir, rcar_report **out) {
  return guarded([&] {
    require(name && cfg && out, "null argument");
    *out = nullptr;
    rcar::RunOptions opts;
    opts.seed = seed;
    opts.replicas = replicas;
    opts.threads = threads == 0 ? 1 : threads;
    const rcar::ExperimentResult res = rcar::run_experiment(name, cfg->cfg, opts);
    if (out_dir)
      res.write(out_dir);
    auto rep = std::make_unique<rcar_report>();
    rep->summary = res.summary.dump(2);
    for (const auto &t : res.tables) {
      rep->names.push_back(t.name());
      rep->texts.push_back(t.to_csv());
    }
    rep->passed = res.passed();
    *out = rep.release();
  });
}

const char *rcar_report_summary_json(const rcar_report *report) {
  return report ? report->summary.c_str() : nullptr;
}

size_t rcar_report_csv_count(const rcar_report *report) { return report ? report->names.size() : 0; }

const char *rcar_report_csv_name(const rcar_report *report, size_t index) {
  return report && index < report->names.size() ? report->names[index].c_str() : nullptr;
}

const char *rcar_report_csv_text(const rcar_report *report, size_t index) {
  return report && index < report->texts.size() ? report->texts[index].c_str() : nullptr;
}

int rcar_report_passed(const rcar_report *report) { return report && report->passed ? 1 : 0; }

void rcar_report_destroy(rcar_report *report) { delete report; }

rcar_status rcar_generate_data(const rcar_config *cfg, const char *path) {
  return guarded([&] {
    require(cfg && path, "null argument");
    const rcar::BasisSpec basis = rcar::detail::basis_from(cfg->cfg);
    rcar::Config c = cfg->cfg;
    c.set("potential.data_file", "");
    const rcar::ObservationData data = rcar::detail::ssl_data(c, basis, rcar::detail::PriorKind::Gamma);
    std::ofstream os(path, std::ios::binary);
    if (!os)
      throw rcar::IoError(std::string("cannot open '") + path + "' for writing");
    rcar::write_observations_csv(os, data);
    if (!os)
      throw rcar::IoError(std::string("failed writing '") + path + "'");
  });
}

rcar_status rcar_acceptance_prob(double psi_u, double psi_v, double *out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = rcar::acceptance_prob(psi_u, psi_v);
  });
}

rcar_status rcar_h1_norm(const double *coeffs, size_t n, double *out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = rcar::h1_norm(to_field(coeffs, n));
  });
}

rcar_status rcar_evaluate_at(const double *coeffs, size_t n, double x, double *out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(n > 0, "need at least one coefficient");
    *out = rcar::evaluate_at(rcar::BasisSpec(n), to_field(coeffs, n), x);
  });
}

} // extern "C"
