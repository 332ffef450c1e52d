#include "mtmeta/significance.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>

#include "mtmeta/distributions.hpp"
#include "mtmeta/rng.hpp"

namespace mtmeta {

const char* to_string(Direction d) {
  switch (d) {
    case Direction::FirstBetter: return "first-better";
    case Direction::SecondBetter: return "second-better";
    case Direction::None: return "none";
  }
  return "?";
}

const char* to_string(TestMethod m) {
  switch (m) {
    case TestMethod::WilcoxonRankSum: return "wilcoxon-rank-sum";
    case TestMethod::PairedBootstrap: return "paired-bootstrap";
    case TestMethod::PairedTTest: return "paired-t-test";
  }
  return "?";
}

TestResult make_test_result(TestMethod method, double statistic, double p_value, double alpha,
                            double effect_sign) {
  TestResult r;
  r.method = method;
  r.statistic = statistic;
  r.p_value = std::clamp(p_value, 0.0, 1.0);
  r.alpha = alpha;
  r.significant = r.p_value < alpha;
  if (r.significant && effect_sign != 0.0) {
    r.direction = effect_sign > 0.0 ? Direction::FirstBetter : Direction::SecondBetter;
  } else {
    r.significant = false;
    r.direction = Direction::None;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Wilcoxon

namespace {

void check_samples(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InsufficientData, "wilcoxon: empty sample");
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "wilcoxon: each sample needs at least 2 values");
  }
  for (double v : a) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "wilcoxon: non-finite value");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "wilcoxon: non-finite value");
  }
}

// Twice the midranks of the pooled sample (a first, then b), so ties stay
// integral. Also returns sum over tie groups of t^3 - t.
struct PooledRanks {
  std::vector<std::int64_t> doubled;
  double tie_term = 0.0;
};

PooledRanks pooled_ranks(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  PooledRanks out;
  out.doubled.assign(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // ranks i+1 .. j+1, midrank*2 = (i+1) + (j+1)
    const auto twice = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) out.doubled[order[k]] = twice;
    const double t = static_cast<double>(j - i + 1);
    out.tie_term += t * t * t - t;
    i = j + 1;
  }
  return out;
}

}  // namespace

double rank_sum(std::span<const double> a, std::span<const double> b) {
  check_samples(a, b);
  const auto ranks = pooled_ranks(a, b);
  std::int64_t w2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) w2 += ranks.doubled[i];
  return static_cast<double>(w2) / 2.0;
}

double wilcoxon_exact_p(std::span<const double> a, std::span<const double> b) {
  check_samples(a, b);
  const std::size_t na = a.size();
  const std::size_t n = na + b.size();
  if (n > 30) throw Error(ErrorKind::InvalidInput, "wilcoxon exact: pooled sample too large");
  const auto ranks = pooled_ranks(a, b);
  std::int64_t w2 = 0;
  for (std::size_t i = 0; i < na; ++i) w2 += ranks.doubled[i];
  const auto e2 = static_cast<std::int64_t>(na * (n + 1));  // 2 * E[W]
  const std::int64_t observed = std::abs(w2 - e2);

  // Enumerate all na-subsets of the pooled positions.
  std::vector<std::size_t> idx(na);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::uint64_t total = 0;
  std::uint64_t extreme = 0;
  while (true) {
    std::int64_t s = 0;
    for (auto k : idx) s += ranks.doubled[k];
    ++total;
    if (std::abs(s - e2) >= observed) ++extreme;
    std::size_t pos = na;
    while (pos > 0 && idx[pos - 1] == n - na + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t k = pos; k < na; ++k) idx[k] = idx[k - 1] + 1;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b) {
  check_samples(a, b);
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double n = na + nb;
  const auto ranks = pooled_ranks(a, b);
  std::int64_t w2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) w2 += ranks.doubled[i];
  const double w = static_cast<double>(w2) / 2.0;
  const double mean = na * (n + 1.0) / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - ranks.tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double dev = std::abs(w - mean) - 0.5;
  if (dev <= 0.0) return 1.0;
  return std::min(1.0, 2.0 * normal_upper_tail(dev / std::sqrt(var)));
}

TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha) {
  check_samples(a, b);
  const double w = rank_sum(a, b);
  const double n = static_cast<double>(a.size() + b.size());
  const double expected = static_cast<double>(a.size()) * (n + 1.0) / 2.0;
  const bool exact = a.size() <= kWilcoxonExactMax && b.size() <= kWilcoxonExactMax;
  const double p = exact ? wilcoxon_exact_p(a, b) : wilcoxon_normal_p(a, b);
  return make_test_result(TestMethod::WilcoxonRankSum, w, p, alpha, w - expected);
}

// ---------------------------------------------------------------------------
// Paired t-test

TestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::Alignment, "paired t-test: " + std::to_string(a.size()) + " vs " +
                                          std::to_string(b.size()) + " scores");
  }
  if (a.size() < 2) throw Error(ErrorKind::InsufficientData, "paired t-test needs m >= 2");
  const std::size_t m = a.size();
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = a[i] - b[i];
    if (!std::isfinite(d[i])) throw Error(ErrorKind::InvalidInput, "paired t-test: non-finite score");
  }
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(m);

  const bool constant = std::all_of(d.begin(), d.end(), [&](double v) { return v == d[0]; });
  if (constant) {
    if (d[0] == 0.0) return make_test_result(TestMethod::PairedTTest, 0.0, 1.0, alpha, 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    return make_test_result(TestMethod::PairedTTest, d[0] > 0 ? inf : -inf, 0.0, alpha, d[0]);
  }
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  const double t = mean / (sd / std::sqrt(static_cast<double>(m)));
  const double p = student_t_two_sided(t, static_cast<double>(m - 1));
  return make_test_result(TestMethod::PairedTTest, t, p, alpha, t);
}

// ---------------------------------------------------------------------------
// Paired bootstrap

SegmentStatsTable segment_stats(const StatsMetric& metric, std::span<const std::string> hypotheses,
                                std::span<const std::string> references) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorKind::Alignment, "bootstrap: hypotheses and references differ in length");
  }
  SegmentStatsTable table;
  table.width = metric.width;
  table.values.reserve(hypotheses.size() * metric.width);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    auto row = metric.segment_stats(hypotheses[i], references[i]);
    if (row.size() != metric.width) {
      throw Error(ErrorKind::InvalidInput, metric.id + ": segment statistics have wrong width");
    }
    table.values.insert(table.values.end(), row.begin(), row.end());
  }
  return table;
}

std::vector<double> resample_sum(const SegmentStatsTable& table, std::uint64_t seed,
                                 std::uint64_t stream) {
  const std::size_t n = table.segments();
  std::vector<double> sum(table.width, 0.0);
  Rng rng(seed, stream);
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = table.row(static_cast<std::size_t>(rng.below(n)));
    for (std::size_t c = 0; c < table.width; ++c) sum[c] += row[c];
  }
  return sum;
}

namespace {

std::vector<double> full_sum(const SegmentStatsTable& table) {
  std::vector<double> sum(table.width, 0.0);
  for (std::size_t i = 0; i < table.segments(); ++i) {
    const auto row = table.row(i);
    for (std::size_t c = 0; c < table.width; ++c) sum[c] += row[c];
  }
  return sum;
}

}  // namespace

TestResult paired_bootstrap_stats(const StatsMetric& metric, const SegmentStatsTable& a,
                                  const SegmentStatsTable& b, const BootstrapOptions& options) {
  if (options.samples < 100) throw Error(ErrorKind::InvalidInput, "bootstrap needs B >= 100");
  if (a.width != metric.width || b.width != metric.width || a.segments() != b.segments()) {
    throw Error(ErrorKind::Alignment, "bootstrap: statistics tables are not aligned");
  }
  if (a.segments() == 0) throw Error(ErrorKind::InvalidInput, "bootstrap: empty corpus");

  const double sign = orientation_sign(metric.orientation);
  const auto score_a = metric.score(full_sum(a));
  const auto score_b = metric.score(full_sum(b));
  if (!score_a || !score_b) {
    throw Error(ErrorKind::InvalidInput, metric.id + " is undefined on the full corpus");
  }
  const double delta = sign * (*score_a - *score_b);
  if (delta == 0.0) {
    return make_test_result(TestMethod::PairedBootstrap, 0.0, 1.0, options.alpha, 0.0);
  }

  // Both systems share the same resampled segment indices: resample_sum
  // reseeds the stream for each table.
  const std::size_t max_rejected = options.samples / 10;
  std::size_t rejected = 0;
  std::size_t losses = 0;
  std::uint64_t redraw = options.samples;
  for (std::size_t r = 0; r < options.samples; ++r) {
    std::uint64_t stream = r;
    while (true) {
      const auto sa = metric.score(resample_sum(a, options.seed, stream));
      const auto sb = metric.score(resample_sum(b, options.seed, stream));
      if (sa && sb) {
        const double d = sign * (*sa - *sb);
        if (d * delta <= 0.0) ++losses;
        break;
      }
      if (++rejected > max_rejected) {
        throw Error(ErrorKind::InvalidInput,
                    metric.id + ": more than 10% of bootstrap resamples undefined");
      }
      stream = redraw++;
    }
  }
  auto result = make_test_result(TestMethod::PairedBootstrap, delta,
                                 static_cast<double>(losses) / static_cast<double>(options.samples),
                                 options.alpha, delta);
  result.rejected = rejected;
  return result;
}

TestResult paired_bootstrap(const StatsMetric& metric, const EvalCorpus& corpus,
                            const SystemId& system_a, const SystemId& system_b,
                            const BootstrapOptions& options) {
  const auto& refs = corpus.references();
  const auto a = segment_stats(metric, corpus.system(system_a), refs);
  const auto b = segment_stats(metric, corpus.system(system_b), refs);
  return paired_bootstrap_stats(metric, a, b, options);
}

// ---------------------------------------------------------------------------
// Policy

const char* to_string(SignificanceTest t) {
  switch (t) {
    case SignificanceTest::PairedBootstrap: return "bootstrap";
    case SignificanceTest::PairedTTest: return "t-test";
    case SignificanceTest::Wilcoxon: return "wilcoxon";
  }
  return "?";
}

SignificanceTest parse_significance_test(const std::string& id) {
  if (id == "bootstrap") return SignificanceTest::PairedBootstrap;
  if (id == "t-test") return SignificanceTest::PairedTTest;
  if (id == "wilcoxon") return SignificanceTest::Wilcoxon;
  throw Error(ErrorKind::InvalidInput,
              "unknown significance test '" + id + "' (expected bootstrap, t-test or wilcoxon)");
}

SignificancePolicy SignificancePolicy::defaults() {
  SignificancePolicy p;
  p.set("BLEU", SignificanceTest::PairedBootstrap);
  p.set("TER", SignificanceTest::PairedBootstrap);
  p.set("chrF", SignificanceTest::PairedTTest);
  p.set("YiSi-1", SignificanceTest::PairedTTest);
  p.set("ESIM", SignificanceTest::PairedTTest);
  p.set("DA", SignificanceTest::Wilcoxon);
  return p;
}

SignificanceTest SignificancePolicy::test_for(const MetricId& metric) const {
  auto it = table_.find(metric);
  return it == table_.end() ? fallback_ : it->second;
}

void SignificancePolicy::read(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidInput,
                  origin + ":" + std::to_string(lineno) + ": expected 'metric = test'");
    }
    const auto metric = trim(line.substr(0, eq));
    const auto test = trim(line.substr(eq + 1));
    if (metric.empty()) {
      throw Error(ErrorKind::InvalidInput, origin + ":" + std::to_string(lineno) + ": empty metric");
    }
    set(metric, parse_significance_test(test));
  }
}

}  // namespace mtmeta
