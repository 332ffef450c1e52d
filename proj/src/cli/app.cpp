#include "cli/app.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli/dataset.hpp"
#include "cli/report.hpp"
#include "mtmeta/serialize.hpp"

namespace mtmeta::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  DatasetSpec data;
  std::vector<std::string> metrics;
  bool metrics_given = false;
  double outlier_cutoff = kDefaultOutlierCutoff;
  double alpha = 0.05;
  double human_alpha = 0.05;
  double williams_alpha = 0.05;
  std::size_t bootstrap_samples = 1000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<double> bin_edges;
  std::vector<std::size_t> windows;
  std::size_t topn_min = 4;
  std::size_t subsample_k = 0;
  std::size_t subsample_trials = 1000;
  std::vector<std::string> systems;
  fs::path policy;
  fs::path output_dir = ".";
  std::string format = "csv";
  // score
  fs::path score_output = "-";
  bool segment_bleu_ter = false;
  // report
  fs::path report_from;
  bool no_compare = false;
};

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
std::string joined(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

// Canonical rendering of every setting that affects results. Output locations
// are left out so that moving the output does not change the hash.
std::string config_hash(const std::string& command, const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "command=" << command << "\n"
     << "data-dir=" << c.data.data_dir.generic_string() << "\n"
     << "language-pairs=" << joined(c.data.language_pairs) << "\n"
     << "lp=" << c.data.lp << "\n"
     << "da=" << c.data.da.generic_string() << "\n"
     << "scores=" << c.data.scores.generic_string() << "\n"
     << "source=" << c.data.source.generic_string() << "\n"
     << "reference=" << c.data.reference.generic_string() << "\n"
     << "system=" << joined(c.data.system_files) << "\n"
     << "metrics=" << (c.metrics_given ? joined(c.metrics) : std::string("*")) << "\n"
     << "outlier-cutoff=" << c.outlier_cutoff << "\n"
     << "alpha=" << c.alpha << "\n"
     << "human-alpha=" << c.human_alpha << "\n"
     << "williams-alpha=" << c.williams_alpha << "\n"
     << "bootstrap-samples=" << c.bootstrap_samples << "\n"
     << "seed=" << (c.seed_given ? std::to_string(c.seed) : std::string("none")) << "\n"
     << "bin-edges=" << joined(c.bin_edges) << "\n"
     << "window=" << joined(c.windows) << "\n"
     << "topn-min=" << c.topn_min << "\n"
     << "subsample-k=" << c.subsample_k << "\n"
     << "subsample-trials=" << c.subsample_trials << "\n"
     << "systems=" << joined(c.systems) << "\n"
     << "policy=" << c.policy.generic_string() << "\n"
     << "segment-bleu-ter=" << c.segment_bleu_ter << "\n"
     << "no-compare=" << c.no_compare << "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::optional<std::vector<MetricId>> requested_metrics(const RunConfig& c) {
  if (!c.metrics_given) return std::nullopt;
  std::vector<MetricId> out;
  for (const auto& m : c.metrics) {
    if (!m.empty()) out.push_back(m);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidInput, "--metrics selects no metric");
  return out;
}

void require_seed(const RunConfig& c, const char* why) {
  if (!c.seed_given) throw Error(ErrorKind::InvalidInput, std::string("--seed is required ") + why);
}

std::set<SystemId> system_subset(const RunConfig& c) {
  return std::set<SystemId>(c.systems.begin(), c.systems.end());
}

CorrelateSettings correlate_settings(const RunConfig& c) {
  CorrelateSettings s;
  s.metrics = requested_metrics(c);
  s.outlier_cutoff = c.outlier_cutoff;
  s.windows = c.windows;
  s.topn_min = c.topn_min;
  s.subsample_k = c.subsample_k;
  s.subsample_trials = c.subsample_trials;
  s.seed = c.seed;
  s.williams_alpha = c.williams_alpha;
  s.systems = system_subset(c);
  return s;
}

CompareSettings compare_settings(const RunConfig& c) {
  CompareSettings s;
  s.metrics = requested_metrics(c);
  s.bootstrap.samples = c.bootstrap_samples;
  s.bootstrap.seed = c.seed;
  s.alpha = c.alpha;
  s.human_alpha = c.human_alpha;
  if (!c.policy.empty()) {
    std::ifstream in(c.policy);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + c.policy.string());
    s.policy.read(in, c.policy.string());
  }
  if (!c.bin_edges.empty()) s.bin_edges = c.bin_edges;
  s.systems = system_subset(c);
  return s;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

std::vector<LanguagePairData> load(const RunConfig& c, std::ostream& err, bool score_corpus = true) {
  LoadOptions lo;
  lo.score_corpus = score_corpus;
  lo.segment_bleu_ter = c.segment_bleu_ter;
  auto data = load_dataset(c.data, lo);
  for (const auto& d : data) print_warnings(d.warnings, err);
  return data;
}

// ---------------------------------------------------------------------------

int cmd_score(const RunConfig& c, const Provenance& prov, std::ostream& out, std::ostream& err) {
  if (c.data.reference.empty() && c.data.data_dir.empty()) {
    throw Error(ErrorKind::InvalidInput, "score needs --reference and --system, or --data-dir");
  }
  DatasetSpec spec = c.data;
  spec.da.clear();
  spec.scores.clear();
  LoadOptions lo;
  lo.score_corpus = false;
  const auto data = load_dataset(spec, lo);
  const auto requested = requested_metrics(c);
  ScoringOptions so;
  so.segment_bleu_ter = c.segment_bleu_ter;
  if (requested) {
    so.metrics.clear();
    for (const auto& m : *requested) {
      if (m == "BLEU") so.metrics.insert(NativeMetric::Bleu);
      else if (m == "TER") so.metrics.insert(NativeMetric::Ter);
      else if (m == "chrF") so.metrics.insert(NativeMetric::Chrf);
      else throw Error(ErrorKind::InvalidInput, "score computes BLEU, TER and chrF, not '" + m + "'");
    }
  }
  for (const auto& d : data) {
    if (!d.corpus || d.corpus->systems().empty()) {
      throw Error(ErrorKind::MissingData, d.lp + ": no system outputs to score");
    }
    std::ostringstream body;
    body << provenance_comment(prov);
    write_score_matrix(body, score_all_systems(*d.corpus, so));
    if (c.data.data_dir.empty() && c.score_output == "-") {
      out << body.str();
    } else if (c.data.data_dir.empty()) {
      write_file(c.score_output, body.str());
    } else {
      write_file(c.output_dir / d.lp / "scores.tsv", body.str());
    }
  }
  (void)err;
  return 0;
}

int cmd_outliers(const RunConfig& c, const Provenance& prov, std::ostream& out,
                 std::ostream& err) {
  const auto data = load(c, err, /*score_corpus=*/false);
  const auto subset = system_subset(c);
  std::ostringstream csv;
  Json reports = Json::object();
  bool header = true;
  for (const auto& d : data) {
    auto da = d.human_system_scores();
    if (!subset.empty()) std::erase_if(da, [&](const auto& kv) { return !subset.count(kv.first); });
    const auto report = detect_outliers(da, c.outlier_cutoff);
    write_outliers_csv(csv, d.lp, report, header);
    header = false;
    reports[d.lp] = report;
    out << d.lp << ": " << report.outliers.size() << " outlier(s)";
    for (const auto& id : report.outliers) out << ' ' << id;
    out << "\n";
  }
  if (c.format == "json") {
    write_file(c.output_dir / "outliers.json",
               dump(Json{{"provenance", provenance_json(prov)}, {"language_pairs", reports}}));
  } else {
    write_file(c.output_dir / "outliers.csv", provenance_comment(prov) + csv.str());
  }
  return 0;
}

void write_correlate_outputs(const RunConfig& c, const Provenance& prov,
                             const CorrelateResult& result) {
  if (c.format == "json") {
    Json j{{"provenance", provenance_json(prov)}};
    const Json body = correlate_json(result);
    for (const auto& [k, v] : body.items()) j[k] = v;
    write_file(c.output_dir / "correlations.json", dump(j));
    return;
  }
  const std::string head = provenance_comment(prov);
  std::vector<CorrelationTable> tables;
  std::ostringstream topn, winners, subsample;
  std::map<std::size_t, std::ostringstream> windows;
  winners << "language_pair,condition,metric\n";
  bool first = true;
  bool first_sub = true;
  std::map<std::size_t, bool> first_window;
  for (const auto& pc : result.pairs) {
    tables.push_back(pc.table);
    for (const auto& [metric, curve] : pc.topn) {
      write_topn_csv(topn, pc.table.language_pair, metric, curve, first);
      first = false;
    }
    for (const auto& [metric, curves] : pc.windows) {
      for (const auto& wc : curves) {
        auto [it, fresh] = first_window.try_emplace(wc.window, true);
        write_window_csv(windows[wc.window], pc.table.language_pair, metric, wc, it->second);
        it->second = false;
        (void)fresh;
      }
    }
    if (pc.subsample) {
      write_subsample_csv(subsample, pc.table.language_pair, *pc.subsample, first_sub);
      first_sub = false;
    }
    for (const auto& m : pc.winners_all) {
      winners << csv_field(pc.table.language_pair) << ",all," << csv_field(m) << "\n";
    }
    if (pc.winners_without) {
      for (const auto& m : *pc.winners_without) {
        winners << csv_field(pc.table.language_pair) << ",without-outliers," << csv_field(m)
                << "\n";
      }
    }
  }
  std::ostringstream corr;
  write_correlations_csv(corr, tables);
  write_file(c.output_dir / "correlations.csv", head + corr.str());
  write_file(c.output_dir / "topn.csv", head + topn.str());
  write_file(c.output_dir / "winners.csv", head + winners.str());
  for (const auto& [w, os] : windows) {
    write_file(c.output_dir / ("window-" + std::to_string(w) + ".csv"), head + os.str());
  }
  if (!first_sub) write_file(c.output_dir / "subsample.csv", head + subsample.str());
}

void print_correlations(const CorrelateResult& result, std::ostream& out) {
  for (const auto& pc : result.pairs) {
    for (const auto& e : pc.table.entries) {
      out << pc.table.language_pair << '\t' << e.metric << '\t' << to_string(e.condition) << '\t'
          << e.systems << '\t' << format_r(e.r) << "\n";
    }
  }
}

int cmd_correlate(const RunConfig& c, const Provenance& prov, std::ostream& out,
                  std::ostream& err) {
  if (c.subsample_k > 0) require_seed(c, "when --subsample-k is set");
  const auto data = load(c, err);
  const auto result = run_correlate(data, correlate_settings(c));
  print_warnings(result.warnings, err);
  write_correlate_outputs(c, prov, result);
  print_correlations(result, out);
  return 0;
}

int cmd_compare(const RunConfig& c, const Provenance& prov, std::ostream& out,
                std::ostream& err) {
  const auto data = load(c, err);
  const auto settings = compare_settings(c);
  if (compare_needs_seed(data, settings)) require_seed(c, "for the paired bootstrap");
  const auto result = run_compare(data, settings);
  print_warnings(result.warnings, err);

  if (c.format == "json") {
    write_file(c.output_dir / "decisions.json",
               dump(Json{{"provenance", provenance_json(prov)},
                         {"decisions", result.analysis.decisions}}));
  } else {
    std::ostringstream csv;
    write_decisions_csv(csv, result.analysis.decisions);
    write_file(c.output_dir / "decisions.csv", provenance_comment(prov) + csv.str());
  }
  Json summary{{"provenance", provenance_json(prov)}};
  const Json body = compare_json(result);
  for (const auto& [k, v] : body.items()) summary[k] = v;
  write_file(c.output_dir / "pairwise.json", dump(summary));

  for (const auto& [metric, t] : result.tallies) {
    out << metric << ": " << t.pairs << " pairs, type-1 " << t.type1 << ", type-2 " << t.type2
        << "\n";
  }
  return 0;
}

int cmd_report(const RunConfig& c, const Provenance& prov, std::ostream& out,
               std::ostream& err) {
  Json report;
  if (!c.report_from.empty()) {
    std::ifstream in(c.report_from);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + c.report_from.string());
    try {
      report = Json::parse(in);
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::InvalidInput, c.report_from.string() + ": " + e.what());
    }
  } else {
    if (c.subsample_k > 0) require_seed(c, "when --subsample-k is set");
    const auto data = load(c, err);
    const auto correlations = run_correlate(data, correlate_settings(c));
    print_warnings(correlations.warnings, err);
    std::optional<CompareResult> comparisons;
    if (!c.no_compare) {
      const auto settings = compare_settings(c);
      if (compare_needs_seed(data, settings)) require_seed(c, "for the paired bootstrap");
      comparisons = run_compare(data, settings);
      print_warnings(comparisons->warnings, err);
    }
    report = report_json(prov, correlations, comparisons);
    write_file(c.output_dir / "report.json", dump(report));
  }
  std::string summary;
  try {
    summary = render_summary(report);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed report: ") + e.what());
  }
  write_file(c.output_dir / "summary.txt", summary);
  out << summary;
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Meta-evaluation of machine translation metrics", "mtmeta"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "Read options from a key = value file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig c;
  // Inputs
  app.add_option("--data-dir", c.data.data_dir, "Directory with one subdirectory per language pair")
      ->check(CLI::ExistingDirectory);
  app.add_option("--language-pairs", c.data.language_pairs, "Restrict --data-dir to these pairs")
      ->delimiter(',');
  app.add_option("--lp", c.data.lp, "Language pair label for single-pair inputs");
  app.add_option("--da", c.data.da, "Human assessment TSV")->check(CLI::ExistingFile);
  app.add_option("--scores", c.data.scores, "Score matrix TSV")->check(CLI::ExistingFile);
  app.add_option("--source", c.data.source, "Source segments")->check(CLI::ExistingFile);
  app.add_option("--reference", c.data.reference, "Reference segments")->check(CLI::ExistingFile);
  app.add_option("--system", c.data.system_files, "System output, NAME=PATH or PATH (repeatable)");
  // Analysis
  auto* metrics_opt =
      app.add_option("--metrics", c.metrics, "Comma-separated metric ids (default: all)")
          ->delimiter(',');
  app.add_option("--outlier-cutoff", c.outlier_cutoff, "Robust z cutoff for outliers")
      ->check(CLI::PositiveNumber);
  app.add_option("--alpha", c.alpha, "Significance level for metric tests")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--human-alpha", c.human_alpha, "Significance level for human tests")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--williams-alpha", c.williams_alpha, "Significance level for metric ranking")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--bootstrap-samples", c.bootstrap_samples, "Bootstrap resamples")
      ->check(CLI::Range(std::size_t{100}, std::size_t{1000000}));
  auto* seed_opt = app.add_option("--seed", c.seed, "Random seed (bootstrap, subsampling)");
  app.add_option("--bin-edges", c.bin_edges, "Delta bin edges starting at 0")->delimiter(',');
  app.add_option("--window", c.windows, "Rolling window size (repeatable)")
      ->delimiter(',')
      ->check(CLI::Range(std::size_t{3}, std::size_t{100000}));
  app.add_option("--topn-min", c.topn_min, "Smallest N on top-N curves")
      ->check(CLI::Range(std::size_t{3}, std::size_t{100000}));
  app.add_option("--subsample-k", c.subsample_k, "Systems per random subset (0 = off)");
  app.add_option("--subsample-trials", c.subsample_trials, "Random subsets to draw")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000000}));
  app.add_option("--systems", c.systems, "Only analyse these systems")->delimiter(',');
  app.add_option("--policy", c.policy, "Metric-to-test file (metric = bootstrap|t-test|wilcoxon)")
      ->check(CLI::ExistingFile);
  // Outputs
  app.add_option("--output-dir", c.output_dir, "Where output files go");
  app.add_option("--format", c.format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  auto* score = app.add_subcommand("score", "Score system outputs with BLEU, TER and chrF");
  score->add_option("--output", c.score_output, "Output TSV ('-' = stdout)");
  score->add_flag("--segment-bleu-ter", c.segment_bleu_ter,
                  "Also write sentence BLEU and TER segment scores");
  auto* outliers = app.add_subcommand("outliers", "Detect outlier systems from human scores");
  auto* correlate = app.add_subcommand("correlate", "Correlate metrics with human scores");
  auto* compare = app.add_subcommand("compare", "Compare metric and human pairwise decisions");
  auto* report = app.add_subcommand("report", "Run correlate and compare, write a summary");
  report->add_option("--from", c.report_from, "Render the summary from an existing report.json")
      ->check(CLI::ExistingFile);
  report->add_flag("--no-compare", c.no_compare, "Skip the pairwise analysis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  c.metrics_given = metrics_opt->count() > 0;
  c.seed_given = seed_opt->count() > 0;

  std::string command;
  for (const auto* sub : {score, outliers, correlate, compare, report}) {
    if (sub->parsed()) command = sub->get_name();
  }
  Provenance prov{config_hash(command, c), c.seed_given ? std::optional(c.seed) : std::nullopt};

  try {
    if (command == "score") return cmd_score(c, prov, out, err);
    if (command == "outliers") return cmd_outliers(c, prov, out, err);
    if (command == "correlate") return cmd_correlate(c, prov, out, err);
    if (command == "compare") return cmd_compare(c, prov, out, err);
    return cmd_report(c, prov, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mtmeta::cli
