#include "mtmeta/meta_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtmeta/distributions.hpp"
#include "mtmeta/rng.hpp"

namespace mtmeta {

const char* to_string(Condition c) { return c == Condition::All ? "all" : "without-outliers"; }

const CorrelationEntry* CorrelationTable::find(const MetricId& metric, Condition condition) const {
  for (const auto& e : entries) {
    if (e.metric == metric && e.condition == condition) return &e;
  }
  return nullptr;
}

MaybeR correlation_over(const std::map<SystemId, double>& da,
                        const std::map<SystemId, double>& metric,
                        const std::vector<SystemId>& systems) {
  std::vector<double> x, y;
  x.reserve(systems.size());
  y.reserve(systems.size());
  for (const auto& s : systems) {
    auto dit = da.find(s);
    auto mit = metric.find(s);
    if (dit == da.end() || mit == metric.end()) {
      throw Error(ErrorKind::MissingData, "system '" + s + "' lacks a DA or metric score");
    }
    x.push_back(dit->second);
    y.push_back(mit->second);
  }
  try {
    return pearson(x, y);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UndefinedCorrelation || e.kind() == ErrorKind::InsufficientData) {
      return std::nullopt;
    }
    throw;
  }
}

std::vector<SystemId> order_by_da(const std::map<SystemId, double>& da,
                                  const std::map<SystemId, double>& metric, bool descending) {
  std::vector<SystemId> ids;
  for (const auto& [id, _] : da) {
    if (metric.count(id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end(), [&](const SystemId& a, const SystemId& b) {
    const double da_a = da.at(a);
    const double da_b = da.at(b);
    if (da_a != da_b) return descending ? da_a > da_b : da_a < da_b;
    return a < b;
  });
  return ids;
}

CorrelationTable correlations_with_without_outliers(const std::string& language_pair,
                                                    const std::map<SystemId, double>& da,
                                                    const ScoreMatrix& matrix, double cutoff) {
  CorrelationTable table;
  table.language_pair = language_pair;
  table.outliers = detect_outliers(da, cutoff);
  table.systems_all = da.size();
  if (!table.outliers.outliers.empty()) {
    table.systems_without = da.size() - table.outliers.outliers.size();
  }
  for (const auto& metric : matrix.metrics()) {
    const auto scores = matrix.system_scores(metric);
    std::vector<SystemId> all;
    for (const auto& [id, _] : da) {
      if (scores.count(id)) all.push_back(id);
    }
    if (all.size() < 4) {
      throw Error(ErrorKind::InsufficientData,
                  metric + ": only " + std::to_string(all.size()) +
                      " systems scored by both DA and the metric (need 4)");
    }
    table.entries.push_back({metric, Condition::All, all.size(), correlation_over(da, scores, all)});
    if (table.systems_without) {
      std::vector<SystemId> kept;
      for (const auto& id : all) {
        if (table.outliers.retained.count(id)) kept.push_back(id);
      }
      table.entries.push_back(
          {metric, Condition::WithoutOutliers, kept.size(), correlation_over(da, scores, kept)});
    }
  }
  return table;
}

std::vector<CurvePoint> topn_curve(const std::map<SystemId, double>& da,
                                   const std::map<SystemId, double>& metric, std::size_t n_min) {
  const auto ordered = order_by_da(da, metric, /*descending=*/true);
  std::vector<CurvePoint> curve;
  for (std::size_t n = ordered.size(); n >= n_min && n > 0; --n) {
    const std::vector<SystemId> top(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(n));
    curve.push_back({n, correlation_over(da, metric, top)});
  }
  return curve;
}

WindowCurve rolling_window_curve(const std::map<SystemId, double>& da,
                                 const std::map<SystemId, double>& metric, std::size_t window) {
  if (window < 2) throw Error(ErrorKind::InvalidInput, "window must be >= 2");
  WindowCurve curve;
  curve.window = window;
  curve.systems = order_by_da(da, metric, /*descending=*/false);
  if (curve.systems.size() < window) {
    throw Error(ErrorKind::InsufficientData,
                std::to_string(curve.systems.size()) + " systems for a window of " +
                    std::to_string(window));
  }
  for (std::size_t start = 0; start + window <= curve.systems.size(); ++start) {
    const std::vector<SystemId> slice(
        curve.systems.begin() + static_cast<std::ptrdiff_t>(start),
        curve.systems.begin() + static_cast<std::ptrdiff_t>(start + window));
    curve.points.push_back({start, correlation_over(da, metric, slice)});
  }
  return curve;
}

std::string SubsampleStudy::group_label(const SubsampleDraw& draw) {
  if (draw.outliers_present.empty()) return "none";
  std::string label;
  for (const auto& id : draw.outliers_present) {
    if (!label.empty()) label += '+';
    label += id;
  }
  return label;
}

std::map<std::string, std::map<MetricId, std::vector<double>>> SubsampleStudy::grouped() const {
  std::map<std::string, std::map<MetricId, std::vector<double>>> out;
  for (const auto& d : draws) {
    auto& group = out[group_label(d)];
    for (const auto& [metric, r] : d.r) {
      auto& values = group[metric];
      if (r) values.push_back(*r);
    }
  }
  return out;
}

SubsampleStudy subsample_correlations(const std::map<SystemId, double>& da,
                                      const ScoreMatrix& matrix,
                                      const std::vector<MetricId>& metrics, std::size_t k,
                                      std::size_t trials, std::uint64_t seed,
                                      const std::set<SystemId>& designated_outliers) {
  if (trials < 1) throw Error(ErrorKind::InvalidInput, "subsampling needs trials >= 1");
  std::map<MetricId, std::map<SystemId, double>> scores;
  for (const auto& m : metrics) scores[m] = matrix.system_scores(m);

  std::vector<SystemId> pool;
  for (const auto& [id, _] : da) {
    bool everywhere = true;
    for (const auto& [m, s] : scores) everywhere = everywhere && s.count(id) > 0;
    if (everywhere) pool.push_back(id);
  }
  if (k > pool.size()) {
    throw Error(ErrorKind::InvalidInput, "subset size " + std::to_string(k) + " exceeds " +
                                             std::to_string(pool.size()) + " systems");
  }

  SubsampleStudy study;
  study.k = k;
  study.seed = seed;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    SubsampleDraw draw;
    draw.trial = t;
    for (auto i : rng.sample_without_replacement(pool.size(), k)) draw.systems.push_back(pool[i]);
    std::sort(draw.systems.begin(), draw.systems.end());
    for (const auto& id : draw.systems) {
      if (designated_outliers.count(id)) draw.outliers_present.push_back(id);
    }
    for (const auto& [m, s] : scores) draw.r[m] = correlation_over(da, s, draw.systems);
    study.draws.push_back(std::move(draw));
  }
  return study;
}

WilliamsResult williams_test(double r12, double r13, double r23, std::size_t n) {
  if (n < 4) throw Error(ErrorKind::InsufficientData, "Williams test needs n >= 4");
  for (double r : {r12, r13, r23}) {
    if (!(r >= -1.0 && r <= 1.0)) {
      throw Error(ErrorKind::Range, "Williams test: correlation outside [-1, 1]");
    }
  }
  double k = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
  if (k < -1e-12) {
    throw Error(ErrorKind::InvalidMatrix, "Williams test: correlation matrix is not positive semi-definite");
  }
  k = std::max(k, 0.0);
  const double df = static_cast<double>(n) - 3.0;
  if (r12 == r13) return {0.0, 0.5};

  const double nm1 = static_cast<double>(n) - 1.0;
  const double mean_r = (r12 + r13) / 2.0;
  const double one_minus = 1.0 - r23;
  const double denom = 2.0 * k * nm1 / (static_cast<double>(n) - 3.0) +
                       mean_r * mean_r * one_minus * one_minus * one_minus;
  double t = 0.0;
  if (denom <= 0.0) {
    t = r12 > r13 ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
  } else {
    t = (r12 - r13) * std::sqrt(nm1 * (1.0 + r23) / denom);
  }
  return {t, student_t_upper_tail(t, df)};
}

std::set<MetricId> rank_metrics(const std::map<SystemId, double>& da, const ScoreMatrix& matrix,
                                const std::vector<MetricId>& metrics, double alpha,
                                const std::set<SystemId>& subset) {
  if (metrics.empty()) throw Error(ErrorKind::InvalidInput, "rank_metrics: no metrics");
  if (metrics.size() == 1) return {metrics.front()};

  std::map<MetricId, std::map<SystemId, double>> scores;
  for (const auto& m : metrics) scores[m] = matrix.system_scores(m);
  std::vector<SystemId> shared;
  for (const auto& [id, _] : da) {
    if (!subset.empty() && !subset.count(id)) continue;
    bool everywhere = true;
    for (const auto& [m, s] : scores) everywhere = everywhere && s.count(id) > 0;
    if (everywhere) shared.push_back(id);
  }

  std::map<MetricId, MaybeR> human_r;
  for (const auto& m : metrics) human_r[m] = correlation_over(da, scores[m], shared);

  std::set<MetricId> winners;
  for (const auto& m : metrics) {
    bool beaten = false;
    for (const auto& other : metrics) {
      if (other == m || !human_r[m] || !human_r[other]) continue;
      const MaybeR between = correlation_over(scores[m], scores[other], shared);
      if (!between) continue;
      const double r_other = std::abs(*human_r[other]);
      const double r_self = std::abs(*human_r[m]);
      // Flip signs so both metrics correlate positively with DA.
      const double s_other = *human_r[other] < 0 ? -1.0 : 1.0;
      const double s_self = *human_r[m] < 0 ? -1.0 : 1.0;
      const double r23 = std::clamp(*between * s_other * s_self, -1.0, 1.0);
      WilliamsResult w;
      try {
        w = williams_test(r_other, r_self, r23, shared.size());
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidMatrix) throw;
        continue;
      }
      if (w.t > 0.0 && w.p < alpha) {
        beaten = true;
        break;
      }
    }
    if (!beaten) winners.insert(m);
  }
  // Dominance is not transitive-safe under ties of numerical noise; an empty
  // set would mean a cycle, so fall back to the highest |r|.
  if (winners.empty()) {
    MetricId best;
    double best_r = -1.0;
    for (const auto& m : metrics) {
      if (human_r[m] && std::abs(*human_r[m]) > best_r) {
        best_r = std::abs(*human_r[m]);
        best = m;
      }
    }
    winners.insert(best.empty() ? metrics.front() : best);
  }
  return winners;
}

}  // namespace mtmeta
