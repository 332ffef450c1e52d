#include "cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

namespace mtmeta::cli {

Json provenance_json(const Provenance& p) {
  return Json{{"tool", kToolName},
              {"version", kToolVersion},
              {"config_hash", p.config_hash},
              {"seed", p.seed ? Json(*p.seed) : Json(nullptr)}};
}

std::string provenance_comment(const Provenance& p) {
  std::string out;
  out += std::string("# tool: ") + kToolName + " " + kToolVersion + "\n";
  out += "# config-hash: " + p.config_hash + "\n";
  out += "# seed: " + (p.seed ? std::to_string(*p.seed) : std::string("none")) + "\n";
  return out;
}

std::vector<MetricId> select_metrics(const LanguagePairData& data,
                                     const std::optional<std::vector<MetricId>>& requested,
                                     std::vector<std::string>& warnings) {
  std::vector<MetricId> out;
  if (!requested) {
    for (const auto& m : data.scores.metrics()) {
      if (m != "DA") out.push_back(m);
    }
  } else {
    for (const auto& m : *requested) {
      if (data.scores.has_metric(m)) {
        out.push_back(m);
      } else {
        warnings.push_back(data.lp + ": metric '" + m + "' not available, skipped");
      }
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::InvalidInput, data.lp + ": no metric selected");
  }
  return out;
}

namespace {

std::map<SystemId, double> filter_systems(std::map<SystemId, double> scores,
                                          const std::set<SystemId>& keep) {
  if (keep.empty()) return scores;
  std::erase_if(scores, [&](const auto& kv) { return !keep.count(kv.first); });
  return scores;
}

}  // namespace

CorrelateResult run_correlate(const std::vector<LanguagePairData>& data,
                              const CorrelateSettings& settings) {
  CorrelateResult result;
  for (const auto& lp : data) {
    const auto metrics = select_metrics(lp, settings.metrics, result.warnings);
    const auto da = filter_systems(lp.human_system_scores(), settings.systems);
    const ScoreMatrix matrix = restrict_metrics(lp.scores, metrics);

    PairCorrelation pc;
    pc.table = correlations_with_without_outliers(lp.lp, da, matrix, settings.outlier_cutoff);
    for (const auto& m : metrics) {
      const auto scores = matrix.system_scores(m);
      pc.topn[m] = topn_curve(da, scores, settings.topn_min);
      for (auto w : settings.windows) {
        try {
          pc.windows[m].push_back(rolling_window_curve(da, scores, w));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::InsufficientData) throw;
          result.warnings.push_back(lp.lp + ": " + m + ": " + e.what());
        }
      }
    }
    if (settings.subsample_k > 0) {
      pc.subsample = subsample_correlations(da, matrix, metrics, settings.subsample_k,
                                            settings.subsample_trials, settings.seed,
                                            pc.table.outliers.outliers);
    }
    pc.winners_all = rank_metrics(da, matrix, metrics, settings.williams_alpha);
    if (pc.table.systems_without) {
      try {
        pc.winners_without = rank_metrics(da, matrix, metrics, settings.williams_alpha,
                                          pc.table.outliers.retained);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientData) throw;
        result.warnings.push_back(lp.lp + ": no ranking without outliers: " + e.what());
      }
    }
    result.pairs.push_back(std::move(pc));
  }
  return result;
}

namespace {

std::optional<StatsMetric> stats_metric_for(const MetricId& id) {
  if (id == "BLEU") return bleu_metric();
  if (id == "TER") return ter_metric();
  if (id == "chrF") return chrf_macro_metric();
  return std::nullopt;
}

}  // namespace

bool compare_needs_seed(const std::vector<LanguagePairData>& data, const CompareSettings& settings) {
  for (const auto& lp : data) {
    std::vector<std::string> ignored;
    std::vector<MetricId> metrics;
    try {
      metrics = select_metrics(lp, settings.metrics, ignored);
    } catch (const Error&) {
      continue;
    }
    for (const auto& m : metrics) {
      if (settings.policy.test_for(m) == SignificanceTest::PairedBootstrap) return true;
    }
  }
  return false;
}

CompareResult run_compare(const std::vector<LanguagePairData>& data, const CompareSettings& settings) {
  CompareResult result;
  std::vector<std::unique_ptr<HumanJudge>> judges;
  std::vector<std::unique_ptr<SystemComparator>> comparators;
  std::vector<LanguagePairInput> inputs;
  std::map<MetricId, BinEdges> bins;

  for (const auto& lp : data) {
    if (!lp.human) {
      throw Error(ErrorKind::MissingData, lp.lp + ": pairwise comparison needs da.tsv");
    }
    LanguagePairInput in;
    in.language_pair = lp.lp;
    in.subset = settings.systems;
    judges.push_back(std::make_unique<HumanJudge>(*lp.human, settings.human_alpha));
    in.human = judges.back().get();

    for (const auto& m : select_metrics(lp, settings.metrics, result.warnings)) {
      const SignificanceTest test = settings.policy.test_for(m);
      if (test == SignificanceTest::PairedBootstrap) {
        auto sm = stats_metric_for(m);
        if (!sm) {
          throw Error(ErrorKind::InvalidInput,
                      m + ": the bootstrap is only available for BLEU, TER and chrF");
        }
        if (!lp.corpus || lp.corpus->systems().empty()) {
          throw Error(ErrorKind::MissingData,
                      lp.lp + ": " + m + " uses the bootstrap, which needs the corpus");
        }
        BootstrapOptions opts = settings.bootstrap;
        opts.alpha = settings.alpha;
        comparators.push_back(std::make_unique<BootstrapComparator>(*sm, *lp.corpus, opts));
      } else {
        comparators.push_back(
            std::make_unique<SegmentComparator>(lp.scores, m, test, settings.alpha));
      }
      in.metrics.push_back(comparators.back().get());
      if (settings.bin_edges) bins.try_emplace(m, BinEdges(*settings.bin_edges));
    }
    inputs.push_back(std::move(in));
  }

  result.analysis = analyze_all_pairs(inputs, bins);
  for (const auto& d : result.analysis.decisions) {
    auto& t = result.tallies[d.metric];
    ++t.pairs;
    if (d.error == ErrorClass::Type1) ++t.type1;
    if (d.error == ErrorClass::Type2) ++t.type2;
  }
  try {
    result.agreement = agreement_matrix(result.analysis.decisions);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Coverage) throw;
    result.warnings.push_back(std::string("no agreement matrix: ") + e.what());
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

Json subsample_json(const SubsampleStudy& study) {
  Json groups = Json::object();
  for (const auto& [label, per_metric] : study.grouped()) {
    Json g = Json::object();
    for (const auto& [metric, rs] : per_metric) {
      Json s{{"count", rs.size()}};
      if (!rs.empty()) {
        double sum = 0.0;
        for (double r : rs) sum += r;
        s["mean"] = sum / static_cast<double>(rs.size());
        s["min"] = *std::min_element(rs.begin(), rs.end());
        s["max"] = *std::max_element(rs.begin(), rs.end());
      }
      g[metric] = s;
    }
    groups[label] = g;
  }
  return Json{{"k", study.k},
              {"seed", study.seed},
              {"trials", study.draws.size()},
              {"groups", groups}};
}

}  // namespace

Json correlate_json(const CorrelateResult& result) {
  Json pairs = Json::array();
  for (const auto& pc : result.pairs) {
    Json j{{"table", pc.table}, {"topn", pc.topn}, {"windows", pc.windows}};
    j["subsample"] = pc.subsample ? subsample_json(*pc.subsample) : Json(nullptr);
    j["winners"] = Json{{"all", pc.winners_all},
                        {"without-outliers",
                         pc.winners_without ? Json(*pc.winners_without) : Json(nullptr)}};
    pairs.push_back(std::move(j));
  }
  return Json{{"language_pairs", pairs}, {"warnings", result.warnings}};
}

Json compare_json(const CompareResult& result) {
  Json tallies = Json::object();
  for (const auto& [metric, t] : result.tallies) {
    tallies[metric] = Json{{"pairs", t.pairs},
                           {"type-1", t.type1},
                           {"type-2", t.type2},
                           {"errors", t.type1 + t.type2}};
  }
  return Json{{"pairs_per_metric", result.analysis.pairs_per_metric},
              {"tallies", tallies},
              {"binned_summary", result.analysis.summary},
              {"agreement", result.agreement},
              {"warnings", result.warnings}};
}

Json report_json(const Provenance& provenance, const CorrelateResult& correlations,
                 const std::optional<CompareResult>& comparisons) {
  return Json{{"provenance", provenance_json(provenance)},
              {"correlations", correlate_json(correlations)},
              {"pairwise", comparisons ? compare_json(*comparisons) : Json(nullptr)}};
}

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string join(const Json& names) {
  if (names.is_null()) return "-";
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n.get<std::string>();
  }
  return out.empty() ? "-" : out;
}

}  // namespace

std::string render_summary(const Json& report) {
  std::ostringstream os;
  const auto& prov = report.at("provenance");
  os << prov.at("tool").get<std::string>() << ' ' << prov.at("version").get<std::string>()
     << "  config " << prov.at("config_hash").get<std::string>() << "  seed "
     << (prov.at("seed").is_null() ? std::string("none") : std::to_string(prov.at("seed").get<std::uint64_t>()))
     << "\n";

  for (const auto& lp : report.at("correlations").at("language_pairs")) {
    const auto table = lp.at("table").get<CorrelationTable>();
    os << "\n[" << table.language_pair << "] systems " << table.systems_all;
    if (table.systems_without) os << " -> " << *table.systems_without << " without outliers";
    os << "\n";
    if (!table.outliers.outliers.empty()) {
      os << "  outliers:";
      for (const auto& id : table.outliers.outliers) {
        const double z = table.outliers.z.at(id);
        os << ' ' << id << " (z " << (std::isinf(z) ? (z > 0 ? "+inf" : "-inf") : fixed(z, 2))
           << ")";
      }
      os << "\n";
    }
    std::size_t width = 8;
    for (const auto& e : table.entries) width = std::max(width, e.metric.size() + 2);
    os << "  " << pad("metric", width) << pad("r(all)", 9) << "r(-out)\n";
    std::vector<MetricId> seen;
    for (const auto& e : table.entries) {
      if (std::find(seen.begin(), seen.end(), e.metric) != seen.end()) continue;
      seen.push_back(e.metric);
      const auto* all = table.find(e.metric, Condition::All);
      const auto* out = table.find(e.metric, Condition::WithoutOutliers);
      os << "  " << pad(e.metric, width)
         << pad(all && all->r ? fixed(*all->r) : "undef", 9)
         << (out ? (out->r ? fixed(*out->r) : "undef") : "-") << "\n";
    }
    const auto& winners = lp.at("winners");
    os << "  best (all): " << join(winners.at("all")) << "\n";
    if (table.systems_without) {
      os << "  best (-out): " << join(winners.at("without-outliers")) << "\n";
    }
  }

  const auto& pw = report.at("pairwise");
  if (!pw.is_null()) {
    os << "\n[pairwise]\n";
    std::size_t width = 8;
    for (const auto& [metric, _] : pw.at("tallies").items()) width = std::max(width, metric.size() + 2);
    os << "  " << pad("metric", width) << pad("pairs", 8) << pad("type-1", 8) << pad("type-2", 8)
       << "errors\n";
    for (const auto& [metric, t] : pw.at("tallies").items()) {
      os << "  " << pad(metric, width) << pad(std::to_string(t.at("pairs").get<std::size_t>()), 8)
         << pad(std::to_string(t.at("type-1").get<std::size_t>()), 8)
         << pad(std::to_string(t.at("type-2").get<std::size_t>()), 8)
         << t.at("errors").get<std::size_t>() << "\n";
    }
    os << "  type-1 = metric difference insignificant, human difference significant (miss)\n"
       << "  type-2 = metric difference significant, human difference insignificant (false alarm)\n";
  }
  return os.str();
}

}  // namespace mtmeta::cli
