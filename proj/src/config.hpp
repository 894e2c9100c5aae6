#pragma once

// Experiment configuration: flat `key = value` lines grouped by [section]
// headers. Every key has a documented default; unknown keys are errors.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcar {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ValueType { Real, Integer, List, Text };

struct ConfigKey {
  std::string section;
  std::string key;
  ValueType type;
  std::string default_value;
  std::string help;

  std::string full_name() const { return section + "." + key; }
};

const std::vector<ConfigKey> &config_schema();
/// Help text listing every key with its default.
std::string config_help();

class Config {
public:
  Config();

  static Config from_string(const std::string &text);
  static Config from_file(const std::string &path);

  /// name is "section.key"; the value is type-checked against the schema.
  void set(const std::string &name, const std::string &value);
  void merge_text(const std::string &text);

  const std::string &raw(const std::string &name) const;
  double real(const std::string &name) const;
  std::int64_t integer(const std::string &name) const;
  std::uint64_t count(const std::string &name) const; // nonnegative integer
  std::vector<double> list(const std::string &name) const;

  /// Resolved values, keyed by "section.key", in schema order.
  const std::map<std::string, std::string> &values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

} // namespace rcar
