#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cli/dataset.hpp"
#include "mtmeta/meta_eval.hpp"
#include "mtmeta/pairwise.hpp"
#include "mtmeta/serialize.hpp"
#include "mtmeta/significance.hpp"

namespace mtmeta::cli {

inline constexpr const char* kToolName = "mtmeta";
inline constexpr const char* kToolVersion = "0.1.0";

struct Provenance {
  std::string config_hash;
  std::optional<std::uint64_t> seed;
};

Json provenance_json(const Provenance& p);
/// "# tool: ...", "# config-hash: ...", "# seed: ..." lines.
std::string provenance_comment(const Provenance& p);

/// Metrics to analyse in one language pair: the requested ones that are
/// present (absent ones are reported in `warnings`), or every metric but DA.
std::vector<MetricId> select_metrics(const LanguagePairData& data,
                                     const std::optional<std::vector<MetricId>>& requested,
                                     std::vector<std::string>& warnings);

struct CorrelateSettings {
  std::optional<std::vector<MetricId>> metrics;
  double outlier_cutoff = kDefaultOutlierCutoff;
  std::vector<std::size_t> windows;
  std::size_t topn_min = 4;
  std::size_t subsample_k = 0;  // 0 = no subsampling
  std::size_t subsample_trials = 1000;
  std::uint64_t seed = 0;
  double williams_alpha = 0.05;
  std::set<SystemId> systems;  // empty = all
};

struct PairCorrelation {
  CorrelationTable table;
  std::map<MetricId, std::vector<CurvePoint>> topn;
  std::map<MetricId, std::vector<WindowCurve>> windows;
  std::optional<SubsampleStudy> subsample;
  std::set<MetricId> winners_all;
  std::optional<std::set<MetricId>> winners_without;
};

struct CorrelateResult {
  std::vector<PairCorrelation> pairs;
  std::vector<std::string> warnings;
};

CorrelateResult run_correlate(const std::vector<LanguagePairData>& data,
                              const CorrelateSettings& settings);

struct CompareSettings {
  std::optional<std::vector<MetricId>> metrics;
  BootstrapOptions bootstrap;
  double alpha = 0.05;
  double human_alpha = 0.05;
  SignificancePolicy policy = SignificancePolicy::defaults();
  std::optional<std::vector<double>> bin_edges;  // default: per-metric edges
  std::set<SystemId> systems;
};

struct ErrorTally {
  std::size_t pairs = 0;
  std::size_t type1 = 0;
  std::size_t type2 = 0;
};

struct CompareResult {
  PairwiseAnalysis analysis;
  AgreementMatrix agreement;
  std::map<MetricId, ErrorTally> tallies;
  std::vector<std::string> warnings;
};

/// True when some selected metric would be decided by the paired bootstrap.
bool compare_needs_seed(const std::vector<LanguagePairData>& data, const CompareSettings& settings);

CompareResult run_compare(const std::vector<LanguagePairData>& data, const CompareSettings& settings);

Json correlate_json(const CorrelateResult& result);
Json compare_json(const CompareResult& result);
Json report_json(const Provenance& provenance, const CorrelateResult& correlations,
                 const std::optional<CompareResult>& comparisons);

/// Plain-text digest of a report; depends only on the JSON so that cached
/// reports render identically.
std::string render_summary(const Json& report);

}  // namespace mtmeta::cli
