#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcar {

std::string format_double(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SweepTable::SweepTable(std::string name, std::vector<std::string> extra_columns)
    : name_(std::move(name)), columns_{"parameter", "estimate", "std_err", "n_samples"} {
  columns_.insert(columns_.end(), extra_columns.begin(), extra_columns.end());
}

void SweepTable::add_row(double parameter, double estimate, double std_err, double n_samples,
                         std::vector<double> extra) {
  std::vector<double> row{parameter, estimate, std_err, n_samples};
  row.insert(row.end(), extra.begin(), extra.end());
  if (row.size() != columns_.size())
    throw std::logic_error("SweepTable '" + name_ + "': row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    os << (i ? "," : "") << columns_[i];
  os << "\n";
  for (const auto &row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
  return os.str();
}

void ExperimentResult::verdict(const std::string &name, bool ok) { summary["verdicts"][name] = ok; }

bool ExperimentResult::passed() const {
  if (!summary.contains("verdicts"))
    return false;
  for (const auto &[k, v] : summary["verdicts"].items())
    if (!v.get<bool>())
      return false;
  return true;
}

void ExperimentResult::write(const std::string &dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  for (const auto &t : tables) {
    std::ofstream out(fs::path(dir) / (t.name() + ".csv"), std::ios::binary);
    out << t.to_csv();
    if (!out)
      throw IoError("failed writing " + t.name() + ".csv");
  }
  std::ofstream js(fs::path(dir) / "summary.json", std::ios::binary);
  js << summary.dump(2) << "\n";
  if (!js)
    throw IoError("failed writing summary.json");
}

} // namespace rcar
