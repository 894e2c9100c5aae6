// rcar: command-line front end over the C interface.

#include <rcar/rcar.h>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Options {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "rcar_out";
  std::size_t replicas = 0;
  std::size_t threads = 1;
  std::vector<std::string> overrides;
};

int fail(rcar_status st, const std::string &context) {
  std::cerr << "rcar: " << context << ": " << rcar_status_string(st);
  const std::string msg = rcar_last_error();
  if (!msg.empty())
    std::cerr << ": " << msg;
  std::cerr << "\n";
  return 1;
}

rcar_status build_config(const Options &o, rcar_config **cfg) {
  rcar_status st = rcar_config_create(cfg);
  if (st != RCAR_OK)
    return st;
  if (!o.config_path.empty() && (st = rcar_config_load_file(*cfg, o.config_path.c_str())) != RCAR_OK)
    return st;
  for (const auto &kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "rcar: --set expects section.key=value, got '" << kv << "'\n";
      return RCAR_INVALID_ARGUMENT;
    }
    st = rcar_config_set(*cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != RCAR_OK)
      return st;
  }
  return RCAR_OK;
}

int run_experiment(const std::string &name, const Options &o) {
  rcar_config *cfg = nullptr;
  rcar_status st = build_config(o, &cfg);
  if (st != RCAR_OK) {
    rcar_config_destroy(cfg);
    return fail(st, "configuration");
  }
  rcar_report *rep = nullptr;
  st = rcar_experiment_run(name.c_str(), cfg, o.seed, o.replicas, o.threads, o.out_dir.c_str(), &rep);
  rcar_config_destroy(cfg);
  if (st != RCAR_OK)
    return fail(st, name);
  for (std::size_t i = 0; i < rcar_report_csv_count(rep); ++i)
    std::cout << "wrote " << o.out_dir << "/" << rcar_report_csv_name(rep, i) << ".csv\n";
  std::cout << "wrote " << o.out_dir << "/summary.json\n";
  const bool ok = rcar_report_passed(rep) == 1;
  std::cout << name << ": " << (ok ? "all verdicts hold" : "some verdicts FAILED") << "\n";
  rcar_report_destroy(rep);
  return ok ? 0 : 3;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"RCAR Metropolis-Hastings experiments"};
  app.footer(std::string("Configuration keys (flat key = value lines under [section] headers):\n\n") +
             rcar_config_help());
  app.require_subcommand(1);
  app.set_version_flag("--version", rcar_version());

  Options o;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", o.config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed")->capture_default_str();
    sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    sub->add_option("--replicas", o.replicas, "replicas; 0 selects the experiment default")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--set", o.overrides, "override a key, e.g. --set kernel.beta=0.3");
  };

  std::string chosen;
  for (std::size_t i = 0; i < rcar_experiment_count(); ++i) {
    const std::string name = rcar_experiment_name(i);
    CLI::App *sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub);
    sub->callback([&chosen, name] { chosen = name; });
  }

  std::string data_path = "observations.csv";
  CLI::App *gen = app.add_subcommand("generate-data", "write synthetic SSL observations as x,y CSV");
  gen->add_option("--config", o.config_path, "configuration file")->check(CLI::ExistingFile);
  gen->add_option("--set", o.overrides, "override a key");
  gen->add_option("--output", data_path, "CSV path")->capture_default_str();
  gen->callback([&chosen] { chosen = "generate-data"; });

  CLI11_PARSE(app, argc, argv);

  if (chosen == "generate-data") {
    rcar_config *cfg = nullptr;
    rcar_status st = build_config(o, &cfg);
    if (st == RCAR_OK)
      st = rcar_generate_data(cfg, data_path.c_str());
    rcar_config_destroy(cfg);
    if (st != RCAR_OK)
      return fail(st, "generate-data");
    std::cout << "wrote " << data_path << "\n";
    return 0;
  }
  return run_experiment(chosen, o);
}
