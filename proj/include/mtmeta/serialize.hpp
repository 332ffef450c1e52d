#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtmeta/meta_eval.hpp"
#include "mtmeta/pairwise.hpp"
#include "mtmeta/robust_stats.hpp"
#include "mtmeta/significance.hpp"

namespace mtmeta {

using Json = nlohmann::ordered_json;

// JSON encodings. Infinite robust z-scores are written as the strings "+inf"
// and "-inf"; undefined correlations as null.
void to_json(Json& j, const OutlierReport& r);
void from_json(const Json& j, OutlierReport& r);
void to_json(Json& j, const TestResult& r);
void to_json(Json& j, const CorrelationEntry& e);
void from_json(const Json& j, CorrelationEntry& e);
void to_json(Json& j, const CorrelationTable& t);
void from_json(const Json& j, CorrelationTable& t);
void to_json(Json& j, const CurvePoint& p);
void from_json(const Json& j, CurvePoint& p);
void to_json(Json& j, const WindowCurve& c);
void from_json(const Json& j, WindowCurve& c);
void to_json(Json& j, const BinCounts& c);
void from_json(const Json& j, BinCounts& c);
void to_json(Json& j, const AgreementMatrix& m);
void from_json(const Json& j, AgreementMatrix& m);
void to_json(Json& j, const PairDecision& d);

/// Writes `v` to JSON as a double, or as "+inf"/"-inf"/"nan" strings.
Json number_or_string(double v);
double number_from_json(const Json& j);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);
std::string format_r(const MaybeR& r);

void write_correlations_csv(std::ostream& out, const std::vector<CorrelationTable>& tables);
void write_topn_csv(std::ostream& out, const std::string& language_pair, const MetricId& metric,
                    const std::vector<CurvePoint>& curve, bool header = true);
void write_window_csv(std::ostream& out, const std::string& language_pair, const MetricId& metric,
                      const WindowCurve& curve, bool header = true);
void write_subsample_csv(std::ostream& out, const std::string& language_pair,
                         const SubsampleStudy& study, bool header = true);
void write_decisions_csv(std::ostream& out, const std::vector<PairDecision>& decisions);
void write_outliers_csv(std::ostream& out, const std::string& language_pair,
                        const OutlierReport& report, bool header = true);

}  // namespace mtmeta
