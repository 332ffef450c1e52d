#include "mtmeta/robust_stats.hpp"

#include <algorithm>
#include <cmath>

namespace mtmeta {

double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::InsufficientData, "median of empty sequence");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

double mad(std::span<const double> values) {
  const double m = median(values);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double x : values) dev.push_back(std::abs(x - m));
  return kMadScale * median(dev);
}

std::vector<double> robust_z(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "robust z needs at least two values");
  }
  const double m = median(values);
  const double scale = mad(values);
  std::vector<double> z;
  z.reserve(values.size());
  for (double x : values) {
    if (scale > 0.0) {
      z.push_back((x - m) / scale);
    } else if (x == m) {
      z.push_back(0.0);
    } else {
      z.push_back(x > m ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity());
    }
  }
  return z;
}

OutlierReport detect_outliers(const std::map<SystemId, double>& scores, double cutoff) {
  if (scores.size() < 3) {
    throw Error(ErrorKind::InsufficientData,
                "outlier detection needs at least 3 systems, got " + std::to_string(scores.size()));
  }
  if (!(cutoff > 0.0)) throw Error(ErrorKind::InvalidInput, "outlier cutoff must be > 0");
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& [_, s] : scores) values.push_back(s);

  OutlierReport report;
  report.median = median(values);
  report.mad = mad(values);
  report.cutoff = cutoff;
  const auto z = robust_z(values);
  std::size_t i = 0;
  for (const auto& [id, _] : scores) {
    report.z[id] = z[i];
    (std::abs(z[i]) > cutoff ? report.outliers : report.retained).insert(id);
    ++i;
  }
  return report;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::Alignment, "pearson: " + std::to_string(x.size()) + " vs " +
                                          std::to_string(y.size()) + " values");
  }
  if (x.size() < 3) throw Error(ErrorKind::InsufficientData, "pearson needs at least 3 points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y)) {
    throw Error(ErrorKind::UndefinedCorrelation, "pearson: zero variance");
  }
  const auto n = static_cast<double>(x.size());
  long double mx = 0.0L, my = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double dx = x[i] - mx;
    const long double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0L || syy == 0.0L) {
    throw Error(ErrorKind::UndefinedCorrelation, "pearson: zero variance");
  }
  const long double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(static_cast<double>(r), -1.0, 1.0);
}

}  // namespace mtmeta
