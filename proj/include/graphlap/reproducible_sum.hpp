#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace graphlap::detail {

/// Sum whose result does not depend on the order of the terms.
///
/// Each term is split against three descending power-of-two anchors into
/// slices that are exact multiples of the anchor's ulp; the slices at each
/// level add up without rounding, so every level sum is exact and therefore
/// order independent. The residual below the last level is dropped, which
/// bounds the error by about n * 2^-100 * max|t|.
inline double reproducible_sum(std::span<const double> terms) {
  double max_abs = 0.0;
  for (double t : terms)
    max_abs = std::max(max_abs, std::abs(t));
  if (max_abs == 0.0 || terms.empty())
    return 0.0;
  if (!std::isfinite(max_abs)) {
    double s = 0.0;
    for (double t : terms)
      s += t;
    return s;
  }

  constexpr int levels = 3;
  const int n_bits =
      static_cast<int>(std::ceil(std::log2(static_cast<double>(terms.size()) + 1.0)));
  // Level-0 anchor dominates |t| * n so that slice sums stay below 2^53 ulps.
  const int top_exp = std::ilogb(max_abs) + n_bits + 2;
  const int fold = std::numeric_limits<double>::digits - n_bits - 2;

  double anchors[levels];
  for (int l = 0; l < levels; ++l)
    anchors[l] = std::ldexp(1.0, top_exp - l * fold);

  double level_sums[levels] = {0.0, 0.0, 0.0};
  for (double t : terms) {
    double rest = t;
    for (int l = 0; l < levels; ++l) {
      const double anchor = anchors[l];
      if (anchor == 0.0)
        break;
      // (anchor + rest) - anchor rounds rest to a multiple of ulp(anchor).
      const double slice = (anchor + rest) - anchor;
      level_sums[l] += slice;
      rest -= slice;
    }
  }
  return level_sums[0] + (level_sums[1] + level_sums[2]);
}

} // namespace graphlap::detail
