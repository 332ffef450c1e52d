#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtmeta/error.hpp"

namespace mtmeta {

using SystemId = std::string;
using MetricId = std::string;

enum class Orientation { HigherIsBetter, LowerIsBetter };

const char* to_string(Orientation o);

/// +1 for higher-is-better, -1 for lower-is-better.
inline double orientation_sign(Orientation o) {
  return o == Orientation::HigherIsBetter ? 1.0 : -1.0;
}

// ---------------------------------------------------------------------------
// Corpus

class EvalCorpus {
 public:
  EvalCorpus(std::string language_pair, std::vector<std::string> sources,
             std::vector<std::string> references,
             std::map<SystemId, std::vector<std::string>> systems);

  const std::string& language_pair() const { return language_pair_; }
  const std::vector<std::string>& sources() const { return sources_; }
  const std::vector<std::string>& references() const { return references_; }
  const std::map<SystemId, std::vector<std::string>>& systems() const {
    return systems_;
  }
  const std::vector<std::string>& system(const SystemId& id) const;
  std::size_t segment_count() const { return references_.size(); }

 private:
  std::string language_pair_;
  std::vector<std::string> sources_;
  std::vector<std::string> references_;
  std::map<SystemId, std::vector<std::string>> systems_;
};

/// Reads UTF-8 text, one segment per line. A single trailing newline does not
/// produce an extra empty segment; CR before LF is kept as part of the text.
std::vector<std::string> read_segments(const std::filesystem::path& path);

EvalCorpus load_corpus(
    std::string language_pair, const std::filesystem::path& source,
    const std::filesystem::path& reference,
    const std::vector<std::pair<SystemId, std::filesystem::path>>& systems);

// ---------------------------------------------------------------------------
// Human assessment

struct AnnotatedScore {
  std::string annotator;
  double raw = 0.0;
};

/// Per-annotator z-scores with the sample deviation (n - 1). Annotators with a
/// single score or zero deviation map to 0. Output order follows input order.
std::vector<double> standardize_annotator(std::span<const AnnotatedScore> raw_scores);

struct DaRecord {
  SystemId system;
  std::size_t segment = 0;  // 0-based
  std::string annotator;    // empty when unknown
  std::optional<double> raw;
  double z = 0.0;

  friend bool operator==(const DaRecord&, const DaRecord&) = default;
};

class HumanAssessment {
 public:
  HumanAssessment() = default;
  /// Records must already carry z-scores.
  explicit HumanAssessment(std::vector<DaRecord> records);

  /// Standardizes raw scores per annotator, then builds the assessment.
  static HumanAssessment from_raw(std::vector<DaRecord> records);

  const std::vector<DaRecord>& records() const { return records_; }
  const std::map<SystemId, double>& system_scores() const { return da_; }
  const std::map<SystemId, std::size_t>& annotation_counts() const { return counts_; }
  std::vector<SystemId> systems() const;

  /// z-scores of one system in record order.
  std::vector<double> z_scores(const SystemId& system) const;

  friend bool operator==(const HumanAssessment&, const HumanAssessment&) = default;

 private:
  std::vector<DaRecord> records_;
  std::map<SystemId, double> da_;
  std::map<SystemId, std::size_t> counts_;
};

/// Mean z-score per system. Throws MissingData if a system has no records.
std::map<SystemId, double> system_da_scores(std::span<const DaRecord> records);
std::map<SystemId, double> system_da_scores(const HumanAssessment& assessment);

HumanAssessment read_assessment(std::istream& in, const std::string& origin = "<stream>");
HumanAssessment load_assessment(const std::filesystem::path& path);
void write_assessment(std::ostream& out, const HumanAssessment& assessment);

// ---------------------------------------------------------------------------
// Score matrix

class ScoreMatrix {
 public:
  void set_orientation(const MetricId& metric, Orientation o);
  void set_system_score(const MetricId& metric, const SystemId& system, double score);
  void set_segment_scores(const MetricId& metric, const SystemId& system,
                          std::vector<double> scores);

  std::vector<MetricId> metrics() const;
  bool has_metric(const MetricId& metric) const;
  Orientation orientation(const MetricId& metric) const;

  /// Systems with a system-level score for `metric`, sorted.
  std::vector<SystemId> systems(const MetricId& metric) const;
  double system_score(const MetricId& metric, const SystemId& system) const;
  std::optional<double> find_system_score(const MetricId& metric,
                                          const SystemId& system) const;
  std::map<SystemId, double> system_scores(const MetricId& metric) const;

  bool has_segment_scores(const MetricId& metric, const SystemId& system) const;
  const std::vector<double>& segment_scores(const MetricId& metric,
                                            const SystemId& system) const;

  const std::map<std::pair<MetricId, SystemId>, double>& system_level() const {
    return system_level_;
  }
  const std::map<std::pair<MetricId, SystemId>, std::vector<double>>& segment_level() const {
    return segment_level_;
  }
  const std::map<MetricId, Orientation>& orientations() const { return orientation_; }

  /// Checks that segment vectors have `segment_count` entries.
  void check_segment_count(std::size_t segment_count) const;

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::map<std::pair<MetricId, SystemId>, double> system_level_;
  std::map<std::pair<MetricId, SystemId>, std::vector<double>> segment_level_;
  std::map<MetricId, Orientation> orientation_;
};

/// Orientation assumed for a metric id when a file does not state it.
Orientation default_orientation(const MetricId& metric);

struct ScoreMatrixLoad {
  ScoreMatrix matrix;
  /// Metrics whose system set differs from the union of all systems.
  std::vector<std::string> warnings;
};

ScoreMatrixLoad read_score_matrix(std::istream& in, const std::string& origin = "<stream>");
ScoreMatrixLoad load_score_matrix(const std::filesystem::path& path);
void write_score_matrix(std::ostream& out, const ScoreMatrix& matrix);

}  // namespace mtmeta
