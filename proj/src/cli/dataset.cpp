#include "cli/dataset.hpp"

#include <algorithm>

namespace mtmeta::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kHumanMetric = "DA";

std::pair<SystemId, fs::path> parse_system_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return {fs::path(arg).stem().string(), fs::path(arg)};
  if (eq == 0) throw Error(ErrorKind::InvalidInput, "empty system name in '" + arg + "'");
  return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error(ErrorKind::InvalidInput, "no such file: " + p.string());
}

EvalCorpus read_corpus(const std::string& lp, const fs::path& source, const fs::path& reference,
                       const std::vector<std::pair<SystemId, fs::path>>& systems) {
  require_file(reference);
  for (const auto& [_, p] : systems) require_file(p);
  if (!source.empty()) {
    require_file(source);
    return load_corpus(lp, source, reference, systems);
  }
  // Sources play no part in scoring; stand in empty lines.
  auto refs = read_segments(reference);
  std::vector<std::string> sources(refs.size());
  std::map<SystemId, std::vector<std::string>> hyps;
  for (const auto& [id, p] : systems) {
    auto segs = read_segments(p);
    if (segs.size() != refs.size()) {
      throw Error(ErrorKind::Alignment, p.string() + " has " + std::to_string(segs.size()) +
                                            " segments but " + reference.string() + " has " +
                                            std::to_string(refs.size()));
    }
    if (!hyps.emplace(id, std::move(segs)).second) {
      throw Error(ErrorKind::DuplicateKey, "system '" + id + "' given twice");
    }
  }
  return EvalCorpus(lp, std::move(sources), std::move(refs), std::move(hyps));
}

LanguagePairData load_pair(const std::string& lp, const fs::path& da, const fs::path& scores,
                           const std::optional<EvalCorpus>& corpus, const LoadOptions& options) {
  LanguagePairData d;
  d.lp = lp;
  if (!da.empty()) {
    require_file(da);
    d.human = load_assessment(da);
  }
  if (!scores.empty()) {
    require_file(scores);
    auto loaded = load_score_matrix(scores);
    d.scores = std::move(loaded.matrix);
    for (auto& w : loaded.warnings) d.warnings.push_back(lp + ": " + w);
  }
  if (corpus) {
    d.corpus = corpus;
    if (options.score_corpus && !corpus->systems().empty()) {
      ScoringOptions so;
      so.segment_bleu_ter = options.segment_bleu_ter;
      merge_missing_metrics(d.scores, score_all_systems(*corpus, so));
    }
    d.scores.check_segment_count(corpus->segment_count());
  }
  return d;
}

}  // namespace

std::map<SystemId, double> LanguagePairData::human_system_scores() const {
  if (human) return human->system_scores();
  if (scores.has_metric(kHumanMetric)) return scores.system_scores(kHumanMetric);
  throw Error(ErrorKind::MissingData, lp + ": no human assessment (da.tsv or a DA metric)");
}

bool LanguagePairData::has_human_system_scores() const {
  return human.has_value() || scores.has_metric(kHumanMetric);
}

void merge_missing_metrics(ScoreMatrix& base, const ScoreMatrix& extra) {
  for (const auto& metric : extra.metrics()) {
    if (base.has_metric(metric)) continue;
    base.set_orientation(metric, extra.orientation(metric));
    for (const auto& [key, v] : extra.system_level()) {
      if (key.first == metric) base.set_system_score(metric, key.second, v);
    }
    for (const auto& [key, v] : extra.segment_level()) {
      if (key.first == metric) base.set_segment_scores(metric, key.second, v);
    }
  }
}

ScoreMatrix restrict_metrics(const ScoreMatrix& matrix, const std::vector<MetricId>& metrics) {
  ScoreMatrix out;
  for (const auto& metric : metrics) {
    if (!matrix.has_metric(metric)) continue;
    out.set_orientation(metric, matrix.orientation(metric));
    for (const auto& [key, v] : matrix.system_level()) {
      if (key.first == metric) out.set_system_score(metric, key.second, v);
    }
    for (const auto& [key, v] : matrix.segment_level()) {
      if (key.first == metric) out.set_segment_scores(metric, key.second, v);
    }
  }
  return out;
}

std::vector<LanguagePairData> load_dataset(const DatasetSpec& spec, const LoadOptions& options) {
  std::vector<LanguagePairData> out;
  if (spec.data_dir.empty()) {
    std::optional<EvalCorpus> corpus;
    if (!spec.reference.empty()) {
      std::vector<std::pair<SystemId, fs::path>> systems;
      for (const auto& s : spec.system_files) systems.push_back(parse_system_arg(s));
      corpus = read_corpus(spec.lp, spec.source, spec.reference, systems);
    } else if (!spec.system_files.empty() || !spec.source.empty()) {
      throw Error(ErrorKind::InvalidInput, "system outputs need --reference");
    }
    if (spec.da.empty() && spec.scores.empty() && !corpus) {
      throw Error(ErrorKind::InvalidInput,
                  "no input: give --data-dir or --da/--scores/--reference");
    }
    out.push_back(load_pair(spec.lp, spec.da, spec.scores, corpus, options));
    return out;
  }

  if (!fs::is_directory(spec.data_dir)) {
    throw Error(ErrorKind::InvalidInput, "no such directory: " + spec.data_dir.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(spec.data_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const std::string lp = dir.filename().string();
    if (!spec.language_pairs.empty() &&
        std::find(spec.language_pairs.begin(), spec.language_pairs.end(), lp) ==
            spec.language_pairs.end()) {
      continue;
    }
    const fs::path da = fs::exists(dir / "da.tsv") ? dir / "da.tsv" : fs::path();
    const fs::path scores = fs::exists(dir / "scores.tsv") ? dir / "scores.tsv" : fs::path();
    std::optional<EvalCorpus> corpus;
    if (fs::exists(dir / "reference.txt")) {
      std::vector<std::pair<SystemId, fs::path>> systems;
      if (fs::is_directory(dir / "systems")) {
        for (const auto& e : fs::directory_iterator(dir / "systems")) {
          if (e.is_regular_file() && e.path().extension() == ".txt") {
            systems.emplace_back(e.path().stem().string(), e.path());
          }
        }
      }
      std::sort(systems.begin(), systems.end());
      const fs::path source = fs::exists(dir / "source.txt") ? dir / "source.txt" : fs::path();
      corpus = read_corpus(lp, source, dir / "reference.txt", systems);
    } else if (fs::is_directory(dir / "systems")) {
      throw Error(ErrorKind::MissingData,
                  (dir / "reference.txt").string() + ": missing, but " +
                      (dir / "systems").string() + " holds system outputs");
    }
    if (da.empty() && scores.empty() && !corpus) continue;
    out.push_back(load_pair(lp, da, scores, corpus, options));
  }
  for (const auto& want : spec.language_pairs) {
    if (std::none_of(out.begin(), out.end(), [&](const auto& d) { return d.lp == want; })) {
      throw Error(ErrorKind::MissingData, "language pair '" + want + "' not found in " +
                                              spec.data_dir.string());
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::MissingData, "no language pairs under " + spec.data_dir.string());
  }
  return out;
}

}  // namespace mtmeta::cli
