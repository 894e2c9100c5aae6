#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rcar {

const std::vector<ConfigKey> &config_schema() {
  using V = ValueType;
  static const std::vector<ConfigKey> schema{
      {"chain", "n_modes", V::Integer, "64", "number of retained Fourier modes m"},
      {"chain", "n_steps", V::Integer, "0", "chain length; 0 selects the experiment default"},
      {"chain", "burn_in", V::Integer, "0", "steps dropped before Cesaro averages and histograms"},
      {"chain", "u0", V::Real, "1.0", "starting point of one-dimensional chains"},

      {"kernel", "beta", V::Real, "0.5", "autoregression parameter beta in (0, 1)"},
      {"kernel", "r", V::Real, "0.5", "Gamma prior shape r"},
      {"kernel", "beta_mismatch", V::Real, "0.9", "innovation beta used by the broken-reversibility control"},
      {"kernel", "cp_rate", V::Real, "1.0", "compound Poisson jump rate"},
      {"kernel", "cp_jump_std", V::Real, "1.0", "compound Poisson jump standard deviation"},

      {"potential", "n_obs", V::Integer, "8", "number of equispaced observation points"},
      {"potential", "sigma", V::Real, "1.0", "observation noise standard deviation"},
      {"potential", "h", V::Real, "1.0", "steepness of g_h(t) = tanh(h t)"},
      {"potential", "data_seed", V::Integer, "7", "seed of the synthetic truth and noise"},
      {"potential", "data_file", V::Text, "", "x,y CSV of observations; empty generates synthetic data"},
      {"potential", "quad_center", V::Real, "1.0", "center c of the 1-D potential (u - c)^2 / 2"},
      {"potential", "quad_scale", V::Real, "1.0", "scale of the 1-D quadratic potential"},
      {"potential", "deconv_decay", V::Real, "0.5", "convolution symbol g_k = exp(-decay k^2)"},
      {"potential", "tail_eps", V::Real, "100", "slope eps of the tail term max(0, eps ||u||^2 - R0^2)"},
      {"potential", "tail_R0", V::Real, "3", "activation radius R0 of the tail term"},
      {"potential", "tail_b", V::Real, "0.5", "ball radius factor b~ of the tail probe"},
      {"potential", "tail_beta", V::Real, "0.25", "ball center factor beta~ of the tail probe"},

      {"semimetric", "omega", V::Real, "1.0", "scale omega of d_s"},
      {"semimetric", "eta", V::Real, "0.1", "growth weight eta of d_s"},
      {"semimetric", "theta", V::Real, "0.01", "Lyapunov weight theta of tilde d_s"},
      {"semimetric", "p", V::Integer, "2", "Lyapunov exponent, V(u) = ||u||^p"},
      {"semimetric", "s", V::Real, "-1", "exponent s of d_s; negative uses the potential's q"},

      {"sweep", "values", V::List, "", "sweep grid (m' or eps); empty selects the experiment default"},
      {"sweep", "ks_level", V::Real, "0.01", "Kolmogorov-Smirnov significance level"},
      {"sweep", "pass_fraction", V::Real, "0.95", "required fraction of passing per-mode KS tests"},
      {"sweep", "confidence", V::Real, "0.99", "bootstrap confidence for trend checks"},
      {"sweep", "bootstrap", V::Integer, "1000", "bootstrap resamples"},
      {"sweep", "hist_bins", V::Integer, "128", "histogram bins on (0, u_max]"},
      {"sweep", "u_max", V::Real, "8", "upper end of the histogram range"},
      {"sweep", "short_steps", V::Integer, "100000", "shorter chain prefix compared against the full run"},
      {"sweep", "tv_tol", V::Real, "0.05", "total variation tolerance"},
      {"sweep", "one_step_starts", V::Integer, "10000", "prior-drawn starts for one-step perturbation gaps"},
      {"sweep", "probe_radii", V::List, "1,2,5,10,20,50", "drift probe radii"},
      {"sweep", "probe_directions", V::Integer, "8", "random directions per drift radius"},
      {"sweep", "drift_reps", V::Integer, "10000", "one-step replicas per drift probe"},
      {"sweep", "contraction_pairs", V::Integer, "16", "nearby pairs for the contraction estimate"},
      {"sweep", "contraction_reps", V::Integer, "10000", "coupled replicas per contraction pair"},
      {"sweep", "contraction_d_max", V::Real, "0.5", "upper bound of d_s for nearby pairs"},
      {"sweep", "smallset_R", V::Real, "25", "sublevel set S(R) = {V <= R}"},
      {"sweep", "smallset_pairs", V::Integer, "256", "coupled pairs in the small-set probe"},
      {"sweep", "smallset_n_max", V::Integer, "256", "largest step count of the dyadic grid"},
      {"sweep", "triangle_triples", V::Integer, "100000", "random triples for the weak triangle constant"},
      {"sweep", "tail_pairs", V::Integer, "10000", "sampled pairs for the tail and growth checks"},
      {"sweep", "tail_floor", V::Real, "1e-8", "floor on exp(Psi(u) - Psi(v)) in the tail probe"},
      {"sweep", "n_min_log2", V::Integer, "8", "smallest chain length 2^k of the MSE grid"},
      {"sweep", "n_max_log2", V::Integer, "18", "largest chain length 2^k of the MSE grid"},
      {"sweep", "moment_draws", V::Integer, "100000", "draws per remainder-moment estimate"},
      {"sweep", "grid_h", V::Real, "0.01", "spacing of the invariant-density grid"},
      {"sweep", "grid_half_width", V::Real, "10", "invariant-density grid covers [-w, w]"},
  };
  return schema;
}

namespace {

const ConfigKey *find_key(const std::string &name) {
  for (const auto &k : config_schema())
    if (k.full_name() == name)
      return &k;
  return nullptr;
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string &s, double &out) {
  const std::string t = trim(s);
  if (t.empty())
    return false;
  errno = 0;
  char *end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_integer(const std::string &s, std::int64_t &out) {
  const std::string t = trim(s);
  if (t.empty())
    return false;
  errno = 0;
  char *end = nullptr;
  out = std::strtoll(t.c_str(), &end, 10);
  return errno == 0 && end == t.c_str() + t.size();
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    parts.push_back(trim(item));
  return parts;
}

void check_type(const ConfigKey &k, const std::string &value) {
  double d;
  std::int64_t i;
  switch (k.type) {
  case ValueType::Real:
    if (!parse_real(value, d))
      throw ConfigError(k.full_name() + ": expected a real number, got '" + value + "'");
    break;
  case ValueType::Integer:
    if (!parse_integer(value, i))
      throw ConfigError(k.full_name() + ": expected an integer, got '" + value + "'");
    break;
  case ValueType::List:
    if (trim(value).empty())
      break;
    for (const auto &part : split_list(value))
      if (!parse_real(part, d))
        throw ConfigError(k.full_name() + ": bad list entry '" + part + "'");
    break;
  case ValueType::Text:
    break;
  }
}

} // namespace

std::string config_help() {
  std::ostringstream os;
  std::string section;
  for (const auto &k : config_schema()) {
    if (k.section != section) {
      section = k.section;
      os << (os.tellp() > 0 ? "\n" : "") << "[" << section << "]\n";
    }
    os << "  " << k.key << " = " << (k.default_value.empty() ? "\"\"" : k.default_value) << "\n      "
       << k.help << "\n";
  }
  return os.str();
}

Config::Config() {
  for (const auto &k : config_schema())
    values_[k.full_name()] = k.default_value;
}

Config Config::from_string(const std::string &text) {
  Config c;
  c.merge_text(text);
  return c;
}

Config Config::from_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

void Config::merge_text(const std::string &text) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      const bool known = std::any_of(config_schema().begin(), config_schema().end(),
                                     [&](const ConfigKey &k) { return k.section == section; });
      if (!known)
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + "expected key = value");
    if (section.empty())
      throw ConfigError(where + "key outside of any [section]");
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    try {
      set(section + "." + trim(line.substr(0, eq)), value);
    } catch (const ConfigError &e) {
      throw ConfigError(where + e.what());
    }
  }
}

void Config::set(const std::string &name, const std::string &value) {
  const ConfigKey *k = find_key(name);
  if (!k)
    throw ConfigError("unknown key '" + name + "'");
  check_type(*k, value);
  values_[name] = trim(value);
}

const std::string &Config::raw(const std::string &name) const {
  const auto it = values_.find(name);
  if (it == values_.end())
    throw ConfigError("unknown key '" + name + "'");
  return it->second;
}

double Config::real(const std::string &name) const {
  double d;
  if (!parse_real(raw(name), d))
    throw ConfigError(name + ": not a real number");
  return d;
}

std::int64_t Config::integer(const std::string &name) const {
  std::int64_t i;
  if (!parse_integer(raw(name), i))
    throw ConfigError(name + ": not an integer");
  return i;
}

std::uint64_t Config::count(const std::string &name) const {
  const std::int64_t i = integer(name);
  if (i < 0)
    throw ConfigError(name + " must be nonnegative");
  return static_cast<std::uint64_t>(i);
}

std::vector<double> Config::list(const std::string &name) const {
  std::vector<double> out;
  const std::string &v = raw(name);
  if (trim(v).empty())
    return out;
  for (const auto &part : split_list(v)) {
    double d;
    if (!parse_real(part, d))
      throw ConfigError(name + ": bad list entry '" + part + "'");
    out.push_back(d);
  }
  return out;
}

} // namespace rcar
