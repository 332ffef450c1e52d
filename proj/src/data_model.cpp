#include "mtmeta/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mtmeta {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::Range: return "range";
    case ErrorKind::MissingData: return "missing-data";
    case ErrorKind::DuplicateKey: return "duplicate-key";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::UndefinedCorrelation: return "undefined-correlation";
    case ErrorKind::InvalidMatrix: return "invalid-matrix";
    case ErrorKind::Coverage: return "coverage";
  }
  return "unknown";
}

const char* to_string(Orientation o) {
  return o == Orientation::HigherIsBetter ? "higher" : "lower";
}

EvalCorpus::EvalCorpus(std::string language_pair, std::vector<std::string> sources,
                       std::vector<std::string> references,
                       std::map<SystemId, std::vector<std::string>> systems)
    : language_pair_(std::move(language_pair)),
      sources_(std::move(sources)),
      references_(std::move(references)),
      systems_(std::move(systems)) {
  if (references_.empty()) {
    throw Error(ErrorKind::InvalidInput, "corpus has no reference segments");
  }
  if (sources_.size() != references_.size()) {
    throw Error(ErrorKind::Alignment,
                "source has " + std::to_string(sources_.size()) +
                    " segments but reference has " + std::to_string(references_.size()));
  }
  for (const auto& [id, segments] : systems_) {
    if (segments.size() != references_.size()) {
      throw Error(ErrorKind::Alignment,
                  "system '" + id + "' has " + std::to_string(segments.size()) +
                      " segments but reference has " + std::to_string(references_.size()));
    }
  }
}

const std::vector<std::string>& EvalCorpus::system(const SystemId& id) const {
  auto it = systems_.find(id);
  if (it == systems_.end()) {
    throw Error(ErrorKind::MissingData, "unknown system '" + id + "'");
  }
  return it->second;
}

std::vector<double> standardize_annotator(std::span<const AnnotatedScore> raw_scores) {
  struct Moments {
    std::size_t n = 0;
    double sum = 0.0;
    double mean = 0.0;
    double ss = 0.0;
  };
  std::unordered_map<std::string, Moments> by_annotator;
  for (const auto& s : raw_scores) {
    if (!(s.raw >= 0.0 && s.raw <= 100.0)) {
      throw Error(ErrorKind::Range, "raw score " + std::to_string(s.raw) +
                                        " outside [0,100] for annotator '" + s.annotator + "'");
    }
    auto& m = by_annotator[s.annotator];
    ++m.n;
    m.sum += s.raw;
  }
  for (auto& [_, m] : by_annotator) m.mean = m.sum / static_cast<double>(m.n);
  for (const auto& s : raw_scores) {
    auto& m = by_annotator[s.annotator];
    m.ss += (s.raw - m.mean) * (s.raw - m.mean);
  }

  std::vector<double> z;
  z.reserve(raw_scores.size());
  for (const auto& s : raw_scores) {
    const auto& m = by_annotator[s.annotator];
    if (m.n < 2 || m.ss == 0.0) {
      z.push_back(0.0);
      continue;
    }
    const double sd = std::sqrt(m.ss / static_cast<double>(m.n - 1));
    z.push_back((s.raw - m.mean) / sd);
  }
  return z;
}

std::map<SystemId, double> system_da_scores(std::span<const DaRecord> records) {
  std::map<SystemId, std::pair<double, std::size_t>> acc;
  for (const auto& r : records) {
    auto& [sum, n] = acc[r.system];
    sum += r.z;
    ++n;
  }
  std::map<SystemId, double> out;
  for (const auto& [id, sn] : acc) out[id] = sn.first / static_cast<double>(sn.second);
  return out;
}

std::map<SystemId, double> system_da_scores(const HumanAssessment& assessment) {
  for (const auto& [id, n] : assessment.annotation_counts()) {
    if (n == 0) throw Error(ErrorKind::MissingData, "system '" + id + "' has no DA records");
  }
  return assessment.system_scores();
}

HumanAssessment::HumanAssessment(std::vector<DaRecord> records) : records_(std::move(records)) {
  for (const auto& r : records_) {
    if (r.raw && !(*r.raw >= 0.0 && *r.raw <= 100.0)) {
      throw Error(ErrorKind::Range, "raw score outside [0,100] for system '" + r.system + "'");
    }
    if (!std::isfinite(r.z)) {
      throw Error(ErrorKind::InvalidInput, "non-finite z-score for system '" + r.system + "'");
    }
    ++counts_[r.system];
  }
  // Summation in record order; mean per system.
  std::map<SystemId, double> sums;
  for (const auto& r : records_) sums[r.system] += r.z;
  for (const auto& [id, sum] : sums) da_[id] = sum / static_cast<double>(counts_[id]);
}

HumanAssessment HumanAssessment::from_raw(std::vector<DaRecord> records) {
  std::vector<AnnotatedScore> raw;
  raw.reserve(records.size());
  for (const auto& r : records) {
    if (!r.raw) {
      throw Error(ErrorKind::InvalidInput,
                  "record for system '" + r.system + "' has neither raw score nor z-score");
    }
    raw.push_back({r.annotator, *r.raw});
  }
  const auto z = standardize_annotator(raw);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].z = z[i];
  return HumanAssessment(std::move(records));
}

std::vector<SystemId> HumanAssessment::systems() const {
  std::vector<SystemId> ids;
  for (const auto& [id, _] : da_) ids.push_back(id);
  return ids;
}

std::vector<double> HumanAssessment::z_scores(const SystemId& system) const {
  std::vector<double> z;
  for (const auto& r : records_) {
    if (r.system == system) z.push_back(r.z);
  }
  if (z.empty()) throw Error(ErrorKind::MissingData, "system '" + system + "' has no DA records");
  return z;
}

// ---------------------------------------------------------------------------

Orientation default_orientation(const MetricId& metric) {
  static const std::set<std::string> lower = {"TER", "WER", "PER", "CDER", "CharacTER",
                                              "EED", "sacreBLEU-TER"};
  return lower.count(metric) ? Orientation::LowerIsBetter : Orientation::HigherIsBetter;
}

void ScoreMatrix::set_orientation(const MetricId& metric, Orientation o) {
  orientation_[metric] = o;
}

void ScoreMatrix::set_system_score(const MetricId& metric, const SystemId& system, double score) {
  if (!std::isfinite(score)) {
    throw Error(ErrorKind::InvalidInput, "non-finite score for " + metric + "/" + system);
  }
  system_level_[{metric, system}] = score;
  orientation_.try_emplace(metric, default_orientation(metric));
}

void ScoreMatrix::set_segment_scores(const MetricId& metric, const SystemId& system,
                                     std::vector<double> scores) {
  for (double v : scores) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidInput, "non-finite segment score for " + metric + "/" + system);
    }
  }
  segment_level_[{metric, system}] = std::move(scores);
  orientation_.try_emplace(metric, default_orientation(metric));
}

std::vector<MetricId> ScoreMatrix::metrics() const {
  std::vector<MetricId> out;
  for (const auto& [key, _] : system_level_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

bool ScoreMatrix::has_metric(const MetricId& metric) const {
  auto it = system_level_.lower_bound({metric, SystemId{}});
  return it != system_level_.end() && it->first.first == metric;
}

Orientation ScoreMatrix::orientation(const MetricId& metric) const {
  auto it = orientation_.find(metric);
  return it == orientation_.end() ? default_orientation(metric) : it->second;
}

std::vector<SystemId> ScoreMatrix::systems(const MetricId& metric) const {
  std::vector<SystemId> out;
  for (auto it = system_level_.lower_bound({metric, SystemId{}});
       it != system_level_.end() && it->first.first == metric; ++it) {
    out.push_back(it->first.second);
  }
  return out;
}

double ScoreMatrix::system_score(const MetricId& metric, const SystemId& system) const {
  auto v = find_system_score(metric, system);
  if (!v) throw Error(ErrorKind::MissingData, "no " + metric + " score for system '" + system + "'");
  return *v;
}

std::optional<double> ScoreMatrix::find_system_score(const MetricId& metric,
                                                     const SystemId& system) const {
  auto it = system_level_.find({metric, system});
  if (it == system_level_.end()) return std::nullopt;
  return it->second;
}

std::map<SystemId, double> ScoreMatrix::system_scores(const MetricId& metric) const {
  std::map<SystemId, double> out;
  for (auto it = system_level_.lower_bound({metric, SystemId{}});
       it != system_level_.end() && it->first.first == metric; ++it) {
    out[it->first.second] = it->second;
  }
  return out;
}

bool ScoreMatrix::has_segment_scores(const MetricId& metric, const SystemId& system) const {
  return segment_level_.count({metric, system}) > 0;
}

const std::vector<double>& ScoreMatrix::segment_scores(const MetricId& metric,
                                                       const SystemId& system) const {
  auto it = segment_level_.find({metric, system});
  if (it == segment_level_.end()) {
    throw Error(ErrorKind::MissingData,
                "no " + metric + " segment scores for system '" + system + "'");
  }
  return it->second;
}

void ScoreMatrix::check_segment_count(std::size_t segment_count) const {
  for (const auto& [key, v] : segment_level_) {
    if (v.size() != segment_count) {
      throw Error(ErrorKind::Alignment, key.first + "/" + key.second + " has " +
                                            std::to_string(v.size()) +
                                            " segment scores, corpus has " +
                                            std::to_string(segment_count));
    }
  }
}

}  // namespace mtmeta
