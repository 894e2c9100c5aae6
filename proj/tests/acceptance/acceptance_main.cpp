// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include "experiments.hpp"
#include "measures.hpp"
#include "rng.hpp"
#include "stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace rcar;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

bool verdict(const ExperimentResult &r, const std::string &name) {
  const auto &v = r.summary["verdicts"];
  return v.contains(name) && v[name].get<bool>();
}

std::string verdict_list(const ExperimentResult &r, const std::vector<std::string> &names) {
  std::string s;
  for (const auto &n : names)
    s += (s.empty() ? "" : ", ") + n + "=" + (verdict(r, n) ? "ok" : "FAILED");
  return s;
}

Outcome all_verdicts(const ExperimentResult &r, const std::vector<std::string> &names, const std::string &extra) {
  bool ok = true;
  for (const auto &n : names)
    ok = ok && verdict(r, n);
  return {ok, verdict_list(r, names) + "; " + extra};
}

class Runner {
public:
  const ExperimentResult &get(const std::string &name) {
    auto it = results_.find(name);
    if (it == results_.end()) {
      const auto t0 = std::chrono::steady_clock::now();
      it = results_.emplace(name, run_experiment(name, Config(), {kSeed, 0, worker_threads()})).first;
      seconds_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return it->second;
  }
  double seconds(const std::string &name) const {
    const auto it = seconds_.find(name);
    return it == seconds_.end() ? 0.0 : it->second;
  }

private:
  std::map<std::string, ExperimentResult> results_;
  std::map<std::string, double> seconds_;
};

std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome convolution_identity() {
  const std::size_t n = 100000;
  std::ostringstream detail;
  bool ok = true;
  for (double eps : {1.0, 0.5, 0.25}) {
    const CompoundPoissonSpec spec{1.0, 1.0, eps};
    RngStream ra(kSeed, 700 + static_cast<std::uint64_t>(eps * 100)), rb(kSeed, 800 + static_cast<std::uint64_t>(eps * 100));
    std::vector<double> full(n), split(n);
    for (auto &x : full)
      x = sample_cp(spec, ra);
    for (auto &x : split)
      x = sample_cp_truncated(spec, rb) + sample_cp_remainder(spec, rb);
    const double d = ks_two_sample(full, split).statistic;
    ok = ok && d < 0.01;
    detail << "cp eps=" << eps << " D=" << d << "; ";
  }
  const double eps = 0.3;
  RngStream ra(kSeed, 900), rb(kSeed, 901);
  std::vector<double> whole(n), parts(n);
  for (auto &x : whole)
    x = std::sqrt(1.0 + eps * eps) * ra.normal();
  for (auto &x : parts)
    x = rb.normal() + eps * rb.normal();
  const double d = ks_two_sample(whole, parts).statistic;
  ok = ok && d < 0.01;
  detail << "gaussian split eps=0.3 D=" << d;
  return {ok, detail.str()};
}

Outcome determinism(Runner &runner) {
  const fs::path root = fs::temp_directory_path() / "rcar_acceptance_determinism";
  fs::remove_all(root);
  bool ok = true;
  std::size_t files = 0;
  std::string mismatches;
  const std::size_t rerun_threads = worker_threads() == 1 ? 2 : 1;
  for (const auto &name : experiment_names()) {
    const ExperimentResult &first = runner.get(name);
    const ExperimentResult second = run_experiment(name, Config(), {kSeed, 0, rerun_threads});
    first.write((root / name / "a").string());
    second.write((root / name / "b").string());
    for (const auto &t : first.tables) {
      const std::string file = t.name() + ".csv";
      const std::string a = read_file(root / name / "a" / file), b = read_file(root / name / "b" / file);
      ++files;
      if (a.empty() || a != b) {
        ok = false;
        mismatches += " " + file;
      }
    }
    if (first.tables.size() != second.tables.size()) {
      ok = false;
      mismatches += " " + name + "(table count)";
    }
  }
  fs::remove_all(root);
  return {ok, std::to_string(files) + " CSV files compared across a rerun with " + std::to_string(rerun_threads) +
                  " thread(s)" + (ok ? "" : "; differing:" + mismatches)};
}

} // namespace

int main() {
  Runner runner;
  struct Criterion {
    int id;
    const char *title;
    const char *experiment; // empty when not backed by an experiment
    double budget_seconds;
    std::function<Outcome()> check;
  };

  const std::vector<Criterion> criteria{
      {1, "prior reversibility", "reversibility", 60,
       [&] {
         const auto &r = runner.get("reversibility");
         return all_verdicts(r,
                             {"pcn_stationary", "gamma_beta_stationary", "pcn_mismatch_control_fails",
                              "gamma_beta_mismatch_control_fails"},
                             "pass fractions " + r.summary["pass_fraction"].dump());
       }},
      {2, "one-dimensional invariant measure", "posterior1d", 120,
       [&] {
         const auto &r = runner.get("posterior1d");
         return all_verdicts(r, {"quadratic_tv_below_tolerance", "quadratic_tv_decreases"},
                             "quadratic " + r.summary["targets"]["quadratic"].dump());
       }},
      {3, "Lyapunov drift", "diagnostics", 180,
       [&] {
         const auto &r = runner.get("diagnostics");
         return all_verdicts(r, {"drift_kappa_below_one"}, r.summary["drift"].dump());
       }},
      {4, "d-contraction of nearby pairs", "diagnostics", 180,
       [&] {
         const auto &r = runner.get("diagnostics");
         return all_verdicts(r, {"contraction_gamma1_below_one"}, r.summary["contraction"].dump());
       }},
      {5, "small sublevel sets", "diagnostics", 240,
       [&] {
         const auto &r = runner.get("diagnostics");
         return all_verdicts(r, {"smallset_mean_below_one", "smallset_nonincreasing"},
                             "trend lower bounds " + r.summary["smallset"]["increase_lower_bounds"].dump());
       }},
      {6, "weak triangle inequality", "diagnostics", 60,
       [&] {
         const auto &r = runner.get("diagnostics");
         return all_verdicts(r, {"weak_triangle_stable"}, r.summary["weak_triangle"].dump());
       }},
      {7, "convolution identity of truncated innovations", "", 60, convolution_identity},
      {8, "projection perturbation", "perturb-projection", 300,
       [&] {
         const auto &r = runner.get("perturb-projection");
         return all_verdicts(r,
                             {"one_step_gap_zero_at_full_resolution", "one_step_gap_nonincreasing",
                              "stationary_norm_gap_nonincreasing"},
                             "one-step gaps " + r.summary["one_step_gap"].dump());
       }},
      {9, "mean squared error scaling", "mse-curve", 480,
       [&] {
         const auto &r = runner.get("mse-curve");
         return all_verdicts(r, {"exact_plateau_zero", "exact_loglog_slope", "plateau_nonincreasing", "bias_nonincreasing"},
                             "exact " + r.summary["exact"].dump());
       }},
      {10, "tail condition counterexample", "diagnostics", 120,
       [&] {
         const auto &r = runner.get("diagnostics");
         const auto &t = r.summary["tail"];
         return all_verdicts(r,
                             {"plain_deconvolution_tail_probe_fails", "tail_modified_probe_passes",
                              "growth_inequality_holds"},
                             "plain min log-ratio " + t["plain_min_log_ratio"].dump() + ", modified min log-ratio " +
                                 t["modified_min_log_ratio"].dump());
       }},
      {11, "determinism", "", 0, [&] { return determinism(runner); }},
  };

  int failures = 0;
  for (const auto &c : criteria) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = c.check();
    } catch (const std::exception &e) {
      out = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (*c.experiment)
      secs = runner.seconds(c.experiment);
    const bool in_budget = c.budget_seconds <= 0 || secs <= c.budget_seconds;
    const bool pass = out.pass && in_budget;
    failures += pass ? 0 : 1;
    std::printf("criterion %2d %-48s %s  (%.1f s%s) %s\n", c.id, c.title, pass ? "PASS" : "FAIL", secs,
                in_budget ? "" : ", over budget", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
