#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtmeta/data_model.hpp"
#include "mtmeta/metrics.hpp"

namespace mtmeta::cli {

/// Where inputs come from. Either a data directory with one subdirectory per
/// language pair, or explicit files for a single language pair.
///
///   <data-dir>/<lp>/da.tsv          human assessment
///   <data-dir>/<lp>/scores.tsv      score matrix
///   <data-dir>/<lp>/reference.txt   corpus (with systems/<name>.txt, source.txt optional)
struct DatasetSpec {
  std::filesystem::path data_dir;
  std::vector<std::string> language_pairs;  // filter for data-dir mode; empty = all
  std::string lp = "xx-yy";
  std::filesystem::path da;
  std::filesystem::path scores;
  std::filesystem::path source;
  std::filesystem::path reference;
  std::vector<std::string> system_files;  // "name=path" or "path" (name = file stem)
};

struct LanguagePairData {
  std::string lp;
  std::optional<HumanAssessment> human;
  /// Ingested scores merged with scores computed from the corpus (ingested
  /// values win for metrics present in both).
  ScoreMatrix scores;
  std::optional<EvalCorpus> corpus;
  std::vector<std::string> warnings;

  /// DA system scores from the assessment, else from a "DA" metric in the
  /// score matrix. Throws MissingData when neither exists.
  std::map<SystemId, double> human_system_scores() const;
  bool has_human_system_scores() const;
};

struct LoadOptions {
  bool score_corpus = true;
  bool segment_bleu_ter = false;
};

std::vector<LanguagePairData> load_dataset(const DatasetSpec& spec, const LoadOptions& options);

/// Copies into `base` every metric of `extra` that `base` lacks.
void merge_missing_metrics(ScoreMatrix& base, const ScoreMatrix& extra);

/// Only the listed metrics (those present), with their orientations.
ScoreMatrix restrict_metrics(const ScoreMatrix& matrix, const std::vector<MetricId>& metrics);

}  // namespace mtmeta::cli
