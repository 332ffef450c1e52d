#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtmeta/data_model.hpp"

namespace mtmeta {

// ---------------------------------------------------------------------------
// Tokenization

struct TokenizedSegment {
  std::vector<std::string> tokens;
  std::string original;
};

struct TokenizerOptions {
  bool lowercase = false;
};

/// mteval-v13a rules: unescape a few HTML entities, pad punctuation and
/// symbols with spaces, split periods/commas except inside numbers, split a
/// dash that follows a digit, then split on whitespace.
TokenizedSegment tokenize(std::string_view segment, const TokenizerOptions& options = {});

// ---------------------------------------------------------------------------
// Scores

enum class ScoreLevel { Corpus, Segment };

struct MetricScore {
  MetricId metric;
  double value = 0.0;
  ScoreLevel level = ScoreLevel::Corpus;
};

enum class BleuSmoothing { None, ExpFloor };

/// Sufficient statistics of BLEU for one or more segments. Counts are integers
/// so pooling is exact.
struct BleuStats {
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;
  std::vector<std::int64_t> matches;  // clipped, per order 1..max_n
  std::vector<std::int64_t> totals;   // candidate n-grams, per order

  explicit BleuStats(int max_n = 4) : matches(max_n, 0), totals(max_n, 0) {}
  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(std::span<const std::string> hyp_tokens,
                     std::span<const std::string> ref_tokens, int max_n = 4);

/// BLEU in [0,100] from pooled statistics.
double bleu_from_stats(const BleuStats& stats, BleuSmoothing smoothing);

MetricScore corpus_bleu(std::span<const std::string> hypotheses,
                        std::span<const std::string> references, int max_n = 4,
                        BleuSmoothing smoothing = BleuSmoothing::None);

MetricScore sentence_bleu(std::string_view hypothesis, std::string_view reference,
                          BleuSmoothing smoothing = BleuSmoothing::ExpFloor);

// ---------------------------------------------------------------------------
// TER

struct TerLimits {
  std::size_t max_block = 10;
  std::size_t max_distance = 50;
};

struct TerAlignment {
  std::size_t shifts = 0;
  std::size_t edit_distance = 0;  // after the shifts
  std::size_t edits() const { return shifts + edit_distance; }
};

/// Unit-cost Levenshtein distance between token-id sequences.
std::size_t token_edit_distance(std::span<const std::uint32_t> hyp,
                                std::span<const std::uint32_t> ref);

/// Greedy-shift TER alignment over token ids: repeatedly applies the block
/// move giving the smallest edit distance (ties: smallest source index,
/// shortest block, smallest destination) while it strictly lowers the
/// distance.
TerAlignment ter_align(std::span<const std::uint32_t> hyp, std::span<const std::uint32_t> ref,
                       const TerLimits& limits = {});

/// Same procedure on token strings.
TerAlignment ter_align_tokens(std::span<const std::string> hyp, std::span<const std::string> ref,
                              const TerLimits& limits = {});

/// Edits plus reference length for one segment after tokenization.
struct TerStats {
  std::int64_t edits = 0;
  std::int64_t ref_len = 0;
  TerStats& operator+=(const TerStats& other) {
    edits += other.edits;
    ref_len += other.ref_len;
    return *this;
  }
};

TerStats ter_stats(std::string_view hypothesis, std::string_view reference);

/// TER as a ratio (edits / reference tokens). Throws on an empty reference.
MetricScore ter(std::string_view hypothesis, std::string_view reference);
MetricScore corpus_ter(std::span<const std::string> hypotheses,
                       std::span<const std::string> references);

// ---------------------------------------------------------------------------
// chrF

struct ChrfStats {
  // Per order 1..n_max.
  std::vector<std::int64_t> matches;
  std::vector<std::int64_t> hyp_counts;
  std::vector<std::int64_t> ref_counts;

  explicit ChrfStats(int n_max = 6) : matches(n_max, 0), hyp_counts(n_max, 0), ref_counts(n_max, 0) {}
  ChrfStats& operator+=(const ChrfStats& other);
  std::int64_t reference_chars() const { return ref_counts.empty() ? 0 : ref_counts[0]; }
};

/// Code points of the segment with whitespace removed.
std::vector<char32_t> chrf_characters(std::string_view text);

ChrfStats chrf_stats(std::string_view hypothesis, std::string_view reference, int n_max = 6);

/// chrF in [0,100]; throws if no reference characters.
double chrf_from_stats(const ChrfStats& stats, double beta = 2.0);

MetricScore sentence_chrf(std::string_view hypothesis, std::string_view reference,
                          int n_max = 6, double beta = 2.0);

enum class ChrfAverage { Micro, Macro };

MetricScore corpus_chrf(std::span<const std::string> hypotheses,
                        std::span<const std::string> references,
                        ChrfAverage mode = ChrfAverage::Macro, int n_max = 6, double beta = 2.0);

// ---------------------------------------------------------------------------
// Corpus-level metrics as sums of per-segment statistics

/// A corpus metric whose score is a function of summed per-segment
/// statistics. Used for paired bootstrap resampling.
struct StatsMetric {
  MetricId id;
  Orientation orientation = Orientation::HigherIsBetter;
  std::size_t width = 0;
  std::function<std::vector<double>(std::string_view hyp, std::string_view ref)> segment_stats;
  /// Returns nullopt when the score is undefined on the summed statistics.
  std::function<std::optional<double>(std::span<const double> summed)> score;
};

StatsMetric bleu_metric(int max_n = 4, BleuSmoothing smoothing = BleuSmoothing::None);
StatsMetric ter_metric();
StatsMetric chrf_macro_metric(int n_max = 6, double beta = 2.0);

// ---------------------------------------------------------------------------

enum class NativeMetric { Bleu, Ter, Chrf };

struct ScoringOptions {
  std::set<NativeMetric> metrics{NativeMetric::Bleu, NativeMetric::Ter, NativeMetric::Chrf};
  /// Attach sentence BLEU and sentence TER vectors too; chrF segment scores
  /// are always attached.
  bool segment_bleu_ter = false;
};

const char* metric_id(NativeMetric m);

ScoreMatrix score_all_systems(const EvalCorpus& corpus, const ScoringOptions& options = {});

}  // namespace mtmeta
