#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtmeta/data_model.hpp"
#include "mtmeta/robust_stats.hpp"

namespace mtmeta {

/// Pearson r, or nullopt where the correlation is undefined (zero variance).
using MaybeR = std::optional<double>;

enum class Condition { All, WithoutOutliers };
const char* to_string(Condition c);

struct CorrelationEntry {
  MetricId metric;
  Condition condition = Condition::All;
  std::size_t systems = 0;
  MaybeR r;

  friend bool operator==(const CorrelationEntry&, const CorrelationEntry&) = default;
};

struct CorrelationTable {
  std::string language_pair;
  std::size_t systems_all = 0;
  /// Present only when at least one outlier was flagged.
  std::optional<std::size_t> systems_without;
  OutlierReport outliers;
  std::vector<CorrelationEntry> entries;  // sorted by (metric, condition)

  const CorrelationEntry* find(const MetricId& metric, Condition condition) const;

  friend bool operator==(const CorrelationTable&, const CorrelationTable&) = default;
};

/// Pearson r of each metric against DA over all systems and, when outliers are
/// flagged, over the retained systems. Metric scores are used as stored (no
/// orientation flip). Outliers are detected on DA scores only.
CorrelationTable correlations_with_without_outliers(const std::string& language_pair,
                                                    const std::map<SystemId, double>& da,
                                                    const ScoreMatrix& matrix,
                                                    double cutoff = kDefaultOutlierCutoff);

/// r over a subset of systems; nullopt if undefined.
MaybeR correlation_over(const std::map<SystemId, double>& da,
                        const std::map<SystemId, double>& metric,
                        const std::vector<SystemId>& systems);

/// Systems present in both maps, ordered by DA (descending or ascending), ties
/// broken by system id.
std::vector<SystemId> order_by_da(const std::map<SystemId, double>& da,
                                  const std::map<SystemId, double>& metric, bool descending);

struct CurvePoint {
  std::size_t key = 0;  // N for top-N curves, start index for windows
  MaybeR r;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// r over the top-N systems by DA for N = #systems down to n_min.
std::vector<CurvePoint> topn_curve(const std::map<SystemId, double>& da,
                                   const std::map<SystemId, double>& metric,
                                   std::size_t n_min = 4);

struct WindowCurve {
  std::size_t window = 0;
  /// Systems in DA-ascending order; point i covers systems[i .. i+window).
  std::vector<SystemId> systems;
  std::vector<CurvePoint> points;

  friend bool operator==(const WindowCurve&, const WindowCurve&) = default;
};

WindowCurve rolling_window_curve(const std::map<SystemId, double>& da,
                                 const std::map<SystemId, double>& metric, std::size_t window);

struct SubsampleDraw {
  std::size_t trial = 0;
  std::vector<SystemId> systems;        // sorted
  std::vector<SystemId> outliers_present;  // designated outliers in the draw, sorted
  std::map<MetricId, MaybeR> r;

  friend bool operator==(const SubsampleDraw&, const SubsampleDraw&) = default;
};

struct SubsampleStudy {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<SubsampleDraw> draws;

  /// Group label for a draw: "none" or the present outliers joined by '+'.
  static std::string group_label(const SubsampleDraw& draw);
  /// Draws grouped by label, r values per metric (undefined values dropped).
  std::map<std::string, std::map<MetricId, std::vector<double>>> grouped() const;
};

/// Draws k systems uniformly without replacement per trial (trial t uses RNG
/// stream (seed, t)) and records r per metric.
SubsampleStudy subsample_correlations(const std::map<SystemId, double>& da,
                                      const ScoreMatrix& matrix,
                                      const std::vector<MetricId>& metrics, std::size_t k,
                                      std::size_t trials, std::uint64_t seed,
                                      const std::set<SystemId>& designated_outliers);

struct WilliamsResult {
  double t = 0.0;
  double p = 0.5;  // one-sided, P(T >= t) with n - 3 df
};

/// Williams test for r12 vs r13 where both share variable 1 and r23 is the
/// correlation between variables 2 and 3.
WilliamsResult williams_test(double r12, double r13, double r23, std::size_t n);

/// Metrics not significantly outperformed (one-sided Williams on |r|, at
/// alpha) by any other metric, over the systems shared by DA and all metrics
/// (restricted to `subset` when it is non-empty). Metrics whose correlation is
/// undefined take part in no comparison.
std::set<MetricId> rank_metrics(const std::map<SystemId, double>& da, const ScoreMatrix& matrix,
                                const std::vector<MetricId>& metrics, double alpha = 0.05,
                                const std::set<SystemId>& subset = {});

}  // namespace mtmeta
