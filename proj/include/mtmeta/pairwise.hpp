#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mtmeta/data_model.hpp"
#include "mtmeta/metrics.hpp"
#include "mtmeta/significance.hpp"

namespace mtmeta {

enum class HumanVerdict { FirstBetter, SecondBetter, Insignificant };

/// Type1 = the metric misses a difference humans find significant; Type2 = the
/// metric reports a significant difference humans do not.
enum class ErrorClass { None, Type1, Type2 };

const char* to_string(HumanVerdict v);
const char* to_string(ErrorClass e);
/// "none", "miss" or "false-alarm".
const char* neutral_name(ErrorClass e);

ErrorClass classify(bool metric_significant, HumanVerdict human);

inline constexpr const char* kNotSignificantBin = "NS";

/// Half-open bins [e0,e1), ..., [ek,inf) over non-negative deltas.
class BinEdges {
 public:
  BinEdges() : BinEdges(defaults()) {}
  explicit BinEdges(std::vector<double> edges);

  /// 0, 1, 2, 3, 5, 10.
  static BinEdges defaults();
  /// Defaults for a metric: TER is on a 0..1 scale, so its edges are divided by 100.
  static BinEdges for_metric(const MetricId& metric);

  BinEdges scaled(double factor) const;
  const std::vector<double>& edges() const { return edges_; }
  std::size_t bin_index(double delta) const;
  std::string label(double delta) const;
  /// Every label in order, followed by "NS".
  std::vector<std::string> labels() const;

 private:
  std::vector<double> edges_;
};

/// Result of comparing two systems under one metric: delta is
/// orientation-adjusted (positive = first system better).
struct Comparison {
  double delta = 0.0;
  TestResult test;
};

class SystemComparator {
 public:
  virtual ~SystemComparator() = default;
  virtual const MetricId& metric() const = 0;
  virtual std::set<SystemId> systems() const = 0;
  virtual Comparison compare(const SystemId& a, const SystemId& b) const = 0;
};

/// Paired bootstrap on a StatsMetric; delta is the corpus-level score difference.
class BootstrapComparator : public SystemComparator {
 public:
  BootstrapComparator(StatsMetric metric, const EvalCorpus& corpus, BootstrapOptions options);

  const MetricId& metric() const override { return metric_.id; }
  std::set<SystemId> systems() const override;
  Comparison compare(const SystemId& a, const SystemId& b) const override;

 private:
  StatsMetric metric_;
  BootstrapOptions options_;
  std::map<SystemId, SegmentStatsTable> tables_;
};

/// Paired t-test or Wilcoxon on segment scores taken from a score matrix;
/// delta is the difference of mean segment scores.
class SegmentComparator : public SystemComparator {
 public:
  SegmentComparator(const ScoreMatrix& matrix, MetricId metric, SignificanceTest test,
                    double alpha = 0.05);

  const MetricId& metric() const override { return metric_; }
  std::set<SystemId> systems() const override;
  Comparison compare(const SystemId& a, const SystemId& b) const override;

 private:
  MetricId metric_;
  SignificanceTest test_;
  double alpha_;
  double sign_;
  std::map<SystemId, std::vector<double>> scores_;
};

/// Human verdicts via the two-sided Wilcoxon rank-sum test on z-scores.
class HumanJudge {
 public:
  explicit HumanJudge(const HumanAssessment& assessment, double alpha = 0.05);

  std::set<SystemId> systems() const;
  TestResult test(const SystemId& a, const SystemId& b) const;
  HumanVerdict verdict(const SystemId& a, const SystemId& b) const;

 private:
  double alpha_;
  std::map<SystemId, std::vector<double>> z_;
};

struct PairDecision {
  std::string language_pair;
  SystemId a;  // the system the metric prefers (or the smaller id on a tie)
  SystemId b;
  MetricId metric;
  double delta = 0.0;
  bool metric_significant = false;
  double metric_p = 1.0;
  std::string bin;
  HumanVerdict human = HumanVerdict::Insignificant;
  double human_p = 1.0;
  ErrorClass error = ErrorClass::None;

  friend bool operator==(const PairDecision&, const PairDecision&) = default;
};

PairDecision decide_pair(const SystemComparator& metric, const HumanJudge& human,
                         const SystemId& a, const SystemId& b, const BinEdges& bins,
                         const std::string& language_pair = "");

struct BinCounts {
  std::size_t human_better = 0;  // humans significantly prefer the metric's winner
  std::size_t human_worse = 0;
  std::size_t human_insignificant = 0;
  std::size_t total() const { return human_better + human_worse + human_insignificant; }

  friend bool operator==(const BinCounts&, const BinCounts&) = default;
};

/// metric -> bin label -> counts; every bin label (and NS) is present.
using BinnedSummary = std::map<MetricId, std::map<std::string, BinCounts>>;

/// Comparators and human judge for one language pair. Pairs are formed over the
/// systems known to the judge and every comparator, optionally restricted to
/// `subset`.
struct LanguagePairInput {
  std::string language_pair;
  const HumanJudge* human = nullptr;
  std::vector<const SystemComparator*> metrics;
  std::set<SystemId> subset;
};

struct PairwiseAnalysis {
  std::vector<PairDecision> decisions;  // sorted by (metric, language pair, a, b)
  BinnedSummary summary;
  std::map<MetricId, std::size_t> pairs_per_metric;
};

/// `bins_for` supplies the edges per metric (BinEdges::for_metric by default).
PairwiseAnalysis analyze_all_pairs(const std::vector<LanguagePairInput>& inputs,
                                   const std::map<MetricId, BinEdges>& bins = {});

BinnedSummary summarize(const std::vector<PairDecision>& decisions,
                        const std::map<MetricId, BinEdges>& bins = {});

struct AgreementMatrix {
  std::vector<MetricId> metrics;
  /// counts[i][i] = errors of metric i; counts[i][j] = errors of i on pairs
  /// where j is correct.
  std::vector<std::vector<std::size_t>> counts;
  std::size_t pairs = 0;

  std::size_t at(const MetricId& row, const MetricId& col) const;

  friend bool operator==(const AgreementMatrix&, const AgreementMatrix&) = default;
};

/// Throws ErrorKind::Coverage unless every metric decided exactly the same pairs.
AgreementMatrix agreement_matrix(const std::vector<PairDecision>& decisions);

}  // namespace mtmeta
