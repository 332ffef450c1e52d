#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtmeta/data_model.hpp"
#include "mtmeta/metrics.hpp"

namespace mtmeta {

enum class Direction { FirstBetter, SecondBetter, None };
enum class TestMethod { WilcoxonRankSum, PairedBootstrap, PairedTTest };

const char* to_string(Direction d);
const char* to_string(TestMethod m);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool significant = false;
  Direction direction = Direction::None;
  TestMethod method = TestMethod::PairedTTest;
  /// Bootstrap only: resamples redrawn because the metric was undefined.
  std::size_t rejected = 0;

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

/// Builds a result whose significance and direction follow from p, alpha and
/// the sign of the effect (positive = first better).
TestResult make_test_result(TestMethod method, double statistic, double p_value, double alpha,
                            double effect_sign);

// ---------------------------------------------------------------------------
// Wilcoxon rank-sum (Mann-Whitney), two-sided

/// Largest per-sample size for which the exact null distribution is used.
inline constexpr std::size_t kWilcoxonExactMax = 8;

/// Sum of midranks of `a` in the pooled sample.
double rank_sum(std::span<const double> a, std::span<const double> b);

/// Exact two-sided p by enumerating every assignment of pooled midranks.
double wilcoxon_exact_p(std::span<const double> a, std::span<const double> b);

/// Normal approximation with tie-corrected variance and continuity correction.
double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b);

TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                             double alpha = 0.05);

// ---------------------------------------------------------------------------
// Paired t-test, two-sided

TestResult paired_t_test(std::span<const double> a, std::span<const double> b,
                         double alpha = 0.05);

// ---------------------------------------------------------------------------
// Paired bootstrap resampling

struct BootstrapOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
};

/// Row-major per-segment statistics of one system under a StatsMetric.
struct SegmentStatsTable {
  std::size_t width = 0;
  std::vector<double> values;
  std::size_t segments() const { return width == 0 ? 0 : values.size() / width; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * width, width);
  }
};

SegmentStatsTable segment_stats(const StatsMetric& metric, std::span<const std::string> hypotheses,
                                std::span<const std::string> references);

/// Summed statistics of one resample, drawn from stream (seed, stream).
std::vector<double> resample_sum(const SegmentStatsTable& table, std::uint64_t seed,
                                 std::uint64_t stream);

/// Koehn-style paired bootstrap. The winner is fixed by the full-corpus delta;
/// p is the fraction of resamples in which the winner does not win.
/// Resample b is drawn from stream (seed, b); resamples on which the metric is
/// undefined are redrawn from streams (seed, B), (seed, B+1), ... and more
/// than 10% rejections is an error.
TestResult paired_bootstrap_stats(const StatsMetric& metric, const SegmentStatsTable& a,
                                  const SegmentStatsTable& b, const BootstrapOptions& options);

TestResult paired_bootstrap(const StatsMetric& metric, const EvalCorpus& corpus,
                            const SystemId& system_a, const SystemId& system_b,
                            const BootstrapOptions& options);

// ---------------------------------------------------------------------------
// Metric -> test policy

enum class SignificanceTest { PairedBootstrap, PairedTTest, Wilcoxon };

const char* to_string(SignificanceTest t);
SignificanceTest parse_significance_test(const std::string& id);

/// Which test decides significance for a metric. Defaults: BLEU and TER use
/// the paired bootstrap, everything else (chrF micro, ingested segment-level
/// metrics) the paired t-test; human scores use Wilcoxon.
class SignificancePolicy {
 public:
  static SignificancePolicy defaults();

  SignificanceTest test_for(const MetricId& metric) const;
  void set(const MetricId& metric, SignificanceTest test) { table_[metric] = test; }
  const std::map<MetricId, SignificanceTest>& table() const { return table_; }

  /// `metric = test` lines; '#' starts a comment. Entries override defaults.
  void read(std::istream& in, const std::string& origin = "<stream>");

 private:
  std::map<MetricId, SignificanceTest> table_;
  SignificanceTest fallback_ = SignificanceTest::PairedTTest;
};

}  // namespace mtmeta
