// biphoton/trajectory.hpp
// Column-oriented time series shared by both dynamical models and the CSV
// writer. Columns are named so downstream code selects by meaning, not by
// index.
#pragma once

#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/numerics.hpp"

namespace biphoton {

struct Trajectory {
  std::vector<std::string> names;             // one per column, no "t"
  std::vector<double> times;                  // strictly increasing
  std::vector<std::vector<double>> cols;      // cols[k].size() == times.size()
  OdeStats stats{};

  void validate() const {
    if (names.size() != cols.size())
      throw invalid_parameter_error("Trajectory: names/cols size mismatch");
    for (const auto& c : cols) {
      if (c.size() != times.size())
        throw invalid_parameter_error(
            "Trajectory: column length differs from time axis");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1]))
        throw invalid_parameter_error(
            "Trajectory: times must be strictly increasing");
    }
  }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return k;
    throw invalid_parameter_error("Trajectory: no column named " + name);
  }
  const std::vector<double>& column(const std::string& name) const {
    return cols[column_index(name)];
  }
};

}  // namespace biphoton
