#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace graphlap {

/// One row of experiment output. `scaled` is NaN when the experiment has no
/// scaled statistic.
struct ExperimentRecord {
  std::string experiment;
  std::string manifold;
  std::string function;
  std::string point;
  std::uint64_t n = 0;
  double h = 0.0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double target = 0.0;
  double error = 0.0;
  double scaled = std::numeric_limits<double>::quiet_NaN();

  bool has_scaled() const noexcept { return !std::isnan(scaled); }
};

} // namespace graphlap
