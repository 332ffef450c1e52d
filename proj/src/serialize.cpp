#include "mtmeta/serialize.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "tsv.hpp"

namespace mtmeta {

using detail::format_double;

Json number_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorKind::InvalidInput, "expected a number, got " + j.dump());
}

namespace {

Json maybe_r(const MaybeR& r) { return r ? Json(*r) : Json(nullptr); }
MaybeR maybe_r_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Condition condition_from(const std::string& s) {
  if (s == to_string(Condition::All)) return Condition::All;
  if (s == to_string(Condition::WithoutOutliers)) return Condition::WithoutOutliers;
  throw Error(ErrorKind::InvalidInput, "unknown condition '" + s + "'");
}

}  // namespace

void to_json(Json& j, const OutlierReport& r) {
  Json z = Json::object();
  for (const auto& [id, v] : r.z) z[id] = number_or_string(v);
  j = Json{{"median", r.median}, {"mad", r.mad},        {"cutoff", r.cutoff},
           {"z", z},             {"outliers", r.outliers}, {"retained", r.retained}};
}

void from_json(const Json& j, OutlierReport& r) {
  r.median = j.at("median").get<double>();
  r.mad = j.at("mad").get<double>();
  r.cutoff = j.at("cutoff").get<double>();
  r.z.clear();
  for (const auto& [id, v] : j.at("z").items()) r.z[id] = number_from_json(v);
  r.outliers = j.at("outliers").get<std::set<SystemId>>();
  r.retained = j.at("retained").get<std::set<SystemId>>();
}

void to_json(Json& j, const TestResult& r) {
  j = Json{{"method", to_string(r.method)},
           {"statistic", number_or_string(r.statistic)},
           {"p_value", r.p_value},
           {"alpha", r.alpha},
           {"significant", r.significant},
           {"direction", to_string(r.direction)}};
  if (r.method == TestMethod::PairedBootstrap) j["rejected"] = r.rejected;
}

void to_json(Json& j, const CorrelationEntry& e) {
  j = Json{{"metric", e.metric},
           {"condition", to_string(e.condition)},
           {"systems", e.systems},
           {"r", maybe_r(e.r)}};
}

void from_json(const Json& j, CorrelationEntry& e) {
  e.metric = j.at("metric").get<std::string>();
  e.condition = condition_from(j.at("condition").get<std::string>());
  e.systems = j.at("systems").get<std::size_t>();
  e.r = maybe_r_from(j.at("r"));
}

void to_json(Json& j, const CorrelationTable& t) {
  j = Json{{"language_pair", t.language_pair},
           {"systems_all", t.systems_all},
           {"systems_without_outliers",
            t.systems_without ? Json(*t.systems_without) : Json(nullptr)},
           {"outliers", t.outliers},
           {"entries", t.entries}};
}

void from_json(const Json& j, CorrelationTable& t) {
  t.language_pair = j.at("language_pair").get<std::string>();
  t.systems_all = j.at("systems_all").get<std::size_t>();
  const auto& w = j.at("systems_without_outliers");
  t.systems_without = w.is_null() ? std::nullopt : std::optional<std::size_t>(w.get<std::size_t>());
  t.outliers = j.at("outliers").get<OutlierReport>();
  t.entries = j.at("entries").get<std::vector<CorrelationEntry>>();
}

void to_json(Json& j, const CurvePoint& p) { j = Json{{"key", p.key}, {"r", maybe_r(p.r)}}; }

void from_json(const Json& j, CurvePoint& p) {
  p.key = j.at("key").get<std::size_t>();
  p.r = maybe_r_from(j.at("r"));
}

void to_json(Json& j, const WindowCurve& c) {
  j = Json{{"window", c.window}, {"systems", c.systems}, {"points", c.points}};
}

void from_json(const Json& j, WindowCurve& c) {
  c.window = j.at("window").get<std::size_t>();
  c.systems = j.at("systems").get<std::vector<SystemId>>();
  c.points = j.at("points").get<std::vector<CurvePoint>>();
}

void to_json(Json& j, const BinCounts& c) {
  j = Json{{"human_better", c.human_better},
           {"human_worse", c.human_worse},
           {"human_insignificant", c.human_insignificant}};
}

void from_json(const Json& j, BinCounts& c) {
  c.human_better = j.at("human_better").get<std::size_t>();
  c.human_worse = j.at("human_worse").get<std::size_t>();
  c.human_insignificant = j.at("human_insignificant").get<std::size_t>();
}

void to_json(Json& j, const AgreementMatrix& m) {
  j = Json{{"metrics", m.metrics}, {"pairs", m.pairs}, {"counts", m.counts}};
}

void from_json(const Json& j, AgreementMatrix& m) {
  m.metrics = j.at("metrics").get<std::vector<MetricId>>();
  m.pairs = j.at("pairs").get<std::size_t>();
  m.counts = j.at("counts").get<std::vector<std::vector<std::size_t>>>();
}

void to_json(Json& j, const PairDecision& d) {
  j = Json{{"language_pair", d.language_pair},
           {"a", d.a},
           {"b", d.b},
           {"metric", d.metric},
           {"delta", d.delta},
           {"metric_significant", d.metric_significant},
           {"metric_p", d.metric_p},
           {"bin", d.bin},
           {"human", to_string(d.human)},
           {"human_p", d.human_p},
           {"error", to_string(d.error)}};
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_r(const MaybeR& r) { return r ? format_double(*r) : "undefined"; }

void write_correlations_csv(std::ostream& out, const std::vector<CorrelationTable>& tables) {
  out << "language_pair,metric,condition,systems,r\n";
  for (const auto& t : tables) {
    for (const auto& e : t.entries) {
      out << csv_field(t.language_pair) << ',' << csv_field(e.metric) << ','
          << to_string(e.condition) << ',' << e.systems << ',' << format_r(e.r) << '\n';
    }
  }
}

void write_topn_csv(std::ostream& out, const std::string& language_pair, const MetricId& metric,
                    const std::vector<CurvePoint>& curve, bool header) {
  if (header) out << "language_pair,metric,n,r\n";
  for (const auto& p : curve) {
    out << csv_field(language_pair) << ',' << csv_field(metric) << ',' << p.key << ','
        << format_r(p.r) << '\n';
  }
}

void write_window_csv(std::ostream& out, const std::string& language_pair, const MetricId& metric,
                      const WindowCurve& curve, bool header) {
  if (header) out << "language_pair,metric,window,start,first_system,last_system,r\n";
  for (const auto& p : curve.points) {
    out << csv_field(language_pair) << ',' << csv_field(metric) << ',' << curve.window << ','
        << p.key << ',' << csv_field(curve.systems[p.key]) << ','
        << csv_field(curve.systems[p.key + curve.window - 1]) << ',' << format_r(p.r) << '\n';
  }
}

void write_subsample_csv(std::ostream& out, const std::string& language_pair,
                         const SubsampleStudy& study, bool header) {
  if (header) out << "language_pair,k,seed,trial,group,metric,r,systems\n";
  for (const auto& d : study.draws) {
    std::string systems;
    for (const auto& s : d.systems) {
      if (!systems.empty()) systems += ';';
      systems += s;
    }
    for (const auto& [metric, r] : d.r) {
      out << csv_field(language_pair) << ',' << study.k << ',' << study.seed << ',' << d.trial
          << ',' << csv_field(SubsampleStudy::group_label(d)) << ',' << csv_field(metric) << ','
          << format_r(r) << ',' << csv_field(systems) << '\n';
    }
  }
}

void write_decisions_csv(std::ostream& out, const std::vector<PairDecision>& decisions) {
  out << "language_pair,system_a,system_b,metric,delta,bin,metric_p,metric_significant,"
         "human_p,human_verdict,error_class,error_name\n";
  for (const auto& d : decisions) {
    out << csv_field(d.language_pair) << ',' << csv_field(d.a) << ',' << csv_field(d.b) << ','
        << csv_field(d.metric) << ',' << format_double(d.delta) << ',' << csv_field(d.bin) << ','
        << format_double(d.metric_p) << ',' << (d.metric_significant ? "true" : "false") << ','
        << format_double(d.human_p) << ',' << to_string(d.human) << ',' << to_string(d.error)
        << ',' << neutral_name(d.error) << '\n';
  }
}

void write_outliers_csv(std::ostream& out, const std::string& language_pair,
                        const OutlierReport& report, bool header) {
  if (header) out << "language_pair,system,robust_z,outlier\n";
  for (const auto& [id, z] : report.z) {
    std::string zs = std::isinf(z) ? (z > 0 ? "+inf" : "-inf") : format_double(z);
    out << csv_field(language_pair) << ',' << csv_field(id) << ',' << zs << ','
        << (report.outliers.count(id) ? "true" : "false") << '\n';
  }
}

}  // namespace mtmeta
