#pragma once

// End-to-end experiments. Each one is a deterministic function of
// (config, seed, replicas); the thread count only changes wall time.

#include "config.hpp"
#include "report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rcar {

struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t replicas = 0; // 0 selects the experiment default
  std::size_t threads = 1;
};

const std::vector<std::string> &experiment_names();
ExperimentResult run_experiment(const std::string &name, const Config &cfg, const RunOptions &opts);

ExperimentResult exp_reversibility(const Config &cfg, const RunOptions &opts);
ExperimentResult exp_posterior_1d(const Config &cfg, const RunOptions &opts);
ExperimentResult exp_perturb_projection(const Config &cfg, const RunOptions &opts);
ExperimentResult exp_perturb_innovation(const Config &cfg, const RunOptions &opts);
ExperimentResult exp_mse_curve(const Config &cfg, const RunOptions &opts);
ExperimentResult exp_diagnostics(const Config &cfg, const RunOptions &opts);

} // namespace rcar
