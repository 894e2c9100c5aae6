#pragma once

// Experiment outputs: CSV sweep tables plus a JSON summary.

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace rcar {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One row per sweep point. The first four columns are always parameter,
/// estimate, std_err, n_samples.
class SweepTable {
public:
  SweepTable(std::string name, std::vector<std::string> extra_columns = {});

  void add_row(double parameter, double estimate, double std_err, double n_samples,
               std::vector<double> extra = {});

  const std::string &name() const { return name_; }
  const std::vector<std::string> &columns() const { return columns_; }
  const std::vector<std::vector<double>> &rows() const { return rows_; }
  std::string to_csv() const;

private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<SweepTable> tables;
  nlohmann::ordered_json summary;

  /// Records a named verdict in summary["verdicts"].
  void verdict(const std::string &name, bool ok);
  bool passed() const;
  /// Writes every table as <dir>/<name>.csv and summary.json.
  void write(const std::string &dir) const;
};

/// Doubles printed with %.17g; non-finite values as nan/inf.
std::string format_double(double x);

} // namespace rcar
