#pragma once

#include <limits>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "mtmeta/data_model.hpp"

namespace mtmeta {

/// Consistency constant applied to the raw median absolute deviation.
inline constexpr double kMadScale = 1.483;
inline constexpr double kDefaultOutlierCutoff = 2.5;

double median(std::span<const double> values);

/// 1.483 * median(|x - median(x)|).
double mad(std::span<const double> values);

/// (x - median) / MAD. With MAD = 0, points at the median get 0 and all other
/// points get +/- infinity.
std::vector<double> robust_z(std::span<const double> values);

struct OutlierReport {
  double median = 0.0;
  double mad = 0.0;
  double cutoff = kDefaultOutlierCutoff;
  std::map<SystemId, double> z;
  std::set<SystemId> outliers;
  std::set<SystemId> retained;

  friend bool operator==(const OutlierReport&, const OutlierReport&) = default;
};

/// Flags systems with |z| > cutoff. Needs at least three systems.
OutlierReport detect_outliers(const std::map<SystemId, double>& scores,
                              double cutoff = kDefaultOutlierCutoff);

/// Sample Pearson correlation. Throws UndefinedCorrelation when either side
/// has zero variance, Alignment on length mismatch, InsufficientData when
/// fewer than three points.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace mtmeta
