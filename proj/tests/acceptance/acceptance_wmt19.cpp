// Acceptance checks against the WMT19 metrics task data. Needs a data
// directory in the layout load_dataset reads (one subdirectory per language
// pair with da.tsv and scores.tsv, plus corpus files for pairwise tests),
// named by MTMETA_WMT19_DIR. Without it the binary exits 77 (skipped).
#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli/dataset.hpp"
#include "cli/report.hpp"
#include "mtmeta/robust_stats.hpp"

using namespace mtmeta;

namespace {

constexpr double kCorrelationTol = 0.005;
constexpr double kOutlierBudget = 1.0;
constexpr double kCorrelationBudget = 5.0;
constexpr std::size_t kExpectedPairs = 1362;
constexpr int kSkipped = 77;

// Systems before and after outlier removal.
const std::map<std::string, std::pair<std::size_t, std::size_t>> kSystemCounts{
    {"de-en", {16, 15}}, {"gu-en", {11, 10}}, {"kk-en", {11, 9}},  {"lt-en", {11, 10}},
    {"ru-en", {14, 13}}, {"zh-en", {15, 13}}, {"de-cs", {11, 10}}, {"en-de", {22, 20}},
    {"en-fi", {12, 11}}, {"en-kk", {11, 9}},  {"en-ru", {12, 11}}, {"fr-de", {10, 7}}};

struct Expected {
  std::string lp;
  std::string metric;
  double all;
  double without;
};

// Published correlations, two decimals. TER is listed by magnitude.
const std::vector<Expected> kCorrelations{
    {"de-en", "BLEU", .81, .79},  {"gu-en", "BLEU", .83, .97},  {"kk-en", "BLEU", .95, .91},
    {"lt-en", "BLEU", .96, .97},  {"ru-en", "BLEU", .87, .81},  {"zh-en", "BLEU", .90, .81},
    {"de-cs", "BLEU", .87, .74},  {"en-de", "BLEU", .97, .81},  {"en-fi", "BLEU", .97, .94},
    {"en-kk", "BLEU", .85, .58},  {"en-ru", "BLEU", .98, .95},  {"fr-de", "BLEU", .87, .85},
    {"de-en", "TER", .87, .81},   {"gu-en", "TER", .89, .95},   {"kk-en", "TER", .80, .57},
    {"lt-en", "TER", .96, .98},   {"ru-en", "TER", .92, .90},   {"zh-en", "TER", .84, .72},
    {"de-cs", "TER", .89, .79},   {"en-de", "TER", .97, .84},   {"en-fi", "TER", .98, .96},
    {"en-kk", "TER", .94, .55},   {"en-ru", "TER", .99, .98},   {"fr-de", "TER", .89, .67},
    {"de-en", "chrF", .92, .86},  {"gu-en", "chrF", .95, .96},  {"kk-en", "chrF", .98, .77},
    {"lt-en", "chrF", .94, .93},  {"ru-en", "chrF", .94, .88},  {"zh-en", "chrF", .96, .84},
    {"de-cs", "chrF", .97, .97},  {"en-de", "chrF", .98, .88},  {"en-fi", "chrF", .99, .97},
    {"en-kk", "chrF", .97, .90},  {"en-ru", "chrF", .94, .97},  {"fr-de", "chrF", .86, .80},
    {"en-de", "YiSi-2", .92, -.01}, {"en-ru", "YiSi-2", -.77, .13}};

int failed = 0;

void report(bool pass, const std::string& name, double secs, const std::string& detail) {
  if (!pass) ++failed;
  std::cout << (pass ? "PASS " : "FAIL ") << name << " [" << std::fixed << std::setprecision(2)
            << secs << " s] " << detail << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string squash(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out += static_cast<char>(std::tolower(c));
  }
  return out;
}

/// Metric id in the matrix matching `name` up to case and punctuation.
std::optional<MetricId> find_metric(const ScoreMatrix& m, const std::string& name) {
  for (const auto& id : m.metrics()) {
    if (squash(id) == squash(name)) return id;
  }
  return std::nullopt;
}

const cli::LanguagePairData* find_pair(const std::vector<cli::LanguagePairData>& data,
                                       const std::string& lp) {
  for (const auto& d : data) {
    if (d.lp == lp) return &d;
  }
  return nullptr;
}

void check_outliers(const std::vector<cli::LanguagePairData>& data) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> problems;
  std::set<SystemId> en_de;
  for (const auto& [lp, counts] : kSystemCounts) {
    const auto* d = find_pair(data, lp);
    if (d == nullptr || !d->has_human_system_scores()) {
      problems.push_back(lp + " missing");
      continue;
    }
    const auto r = detect_outliers(d->human_system_scores(), kDefaultOutlierCutoff);
    const std::size_t all = r.z.size(), kept = r.retained.size();
    if (all != counts.first || kept != counts.second) {
      problems.push_back(lp + " " + std::to_string(all) + "->" + std::to_string(kept));
    }
    if (lp == "en-de") en_de = r.outliers;
  }
  // The two en-de systems named as outliers.
  std::size_t named = 0;
  for (const auto& s : en_de) {
    const auto q = squash(s);
    if (q.rfind("endetask", 0) == 0 || q.rfind("onlinex", 0) == 0) ++named;
  }
  if (en_de.size() != 2 || named != 2) problems.push_back("en-de outlier names");
  const double secs = seconds_since(start);
  if (secs > kOutlierBudget) problems.push_back("over budget");
  std::string detail = std::to_string(kSystemCounts.size()) + " language pairs";
  for (const auto& p : problems) detail += "; " + p;
  report(problems.empty(), "outlier-reproduction", secs, detail);
}

void check_correlations(const std::vector<cli::LanguagePairData>& data) {
  const auto start = std::chrono::steady_clock::now();
  cli::CorrelateSettings settings;
  const auto result = cli::run_correlate(data, settings);
  std::vector<std::string> problems;
  std::size_t checked = 0;
  for (const auto& e : kCorrelations) {
    const cli::PairCorrelation* pc = nullptr;
    for (const auto& p : result.pairs) {
      if (p.table.language_pair == e.lp) pc = &p;
    }
    const auto* d = find_pair(data, e.lp);
    const auto id = d ? find_metric(d->scores, e.metric) : std::nullopt;
    if (pc == nullptr || !id) {
      problems.push_back(e.lp + " " + e.metric + " missing");
      continue;
    }
    const bool magnitude = squash(e.metric) == "ter";
    for (const auto& [cond, want] : {std::pair{Condition::All, e.all},
                                     std::pair{Condition::WithoutOutliers, e.without}}) {
      const auto* entry = pc->table.find(*id, cond);
      if (entry == nullptr || !entry->r) {
        problems.push_back(e.lp + " " + e.metric + " " + to_string(cond) + " undefined");
        continue;
      }
      const double got = magnitude ? std::fabs(*entry->r) : *entry->r;
      ++checked;
      if (std::fabs(got - want) > kCorrelationTol) {
        std::ostringstream s;
        s << e.lp << " " << e.metric << " " << to_string(cond) << " " << std::setprecision(4)
          << got << " vs " << want;
        problems.push_back(s.str());
      }
    }
  }
  const double secs = seconds_since(start);
  if (secs > kCorrelationBudget) problems.push_back("over budget");
  std::string detail = std::to_string(checked) + " entries";
  for (const auto& p : problems) detail += "; " + p;
  report(problems.empty(), "correlation-reproduction", secs, detail);
}

void check_pair_count(const std::vector<cli::LanguagePairData>& data) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    cli::CompareSettings settings;
    settings.metrics = std::vector<MetricId>{"BLEU"};
    settings.bootstrap.seed = 1;
    const auto result = cli::run_compare(data, settings);
    const auto it = result.analysis.pairs_per_metric.find("BLEU");
    const std::size_t pairs = it == result.analysis.pairs_per_metric.end() ? 0 : it->second;
    pass = pairs == kExpectedPairs;
    detail = std::to_string(pairs) + " BLEU comparisons over " + std::to_string(data.size()) +
             " language pairs";
  } catch (const std::exception& e) {
    detail = std::string("error: ") + e.what();
  }
  report(pass, "pair-count", seconds_since(start), detail);
}

}  // namespace

int main() {
  const char* dir = std::getenv("MTMETA_WMT19_DIR");
  if (dir == nullptr || *dir == '\0') {
    std::cout << "SKIP outlier-reproduction, correlation-reproduction, pair-count: "
                 "MTMETA_WMT19_DIR is not set"
              << std::endl;
    return kSkipped;
  }
  std::vector<cli::LanguagePairData> data;
  try {
    cli::DatasetSpec spec;
    spec.data_dir = dir;
    data = cli::load_dataset(spec, cli::LoadOptions{});
  } catch (const std::exception& e) {
    std::cout << "FAIL loading " << dir << ": " << e.what() << std::endl;
    return 1;
  }
  check_outliers(data);
  check_correlations(data);
  check_pair_count(data);
  return failed == 0 ? 0 : 1;
}
