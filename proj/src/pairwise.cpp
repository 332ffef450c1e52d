#include "mtmeta/pairwise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

namespace mtmeta {

const char* to_string(HumanVerdict v) {
  switch (v) {
    case HumanVerdict::FirstBetter: return "a-better";
    case HumanVerdict::SecondBetter: return "b-better";
    case HumanVerdict::Insignificant: return "insignificant";
  }
  return "?";
}

const char* to_string(ErrorClass e) {
  switch (e) {
    case ErrorClass::None: return "none";
    case ErrorClass::Type1: return "type-1";
    case ErrorClass::Type2: return "type-2";
  }
  return "?";
}

const char* neutral_name(ErrorClass e) {
  switch (e) {
    case ErrorClass::None: return "none";
    case ErrorClass::Type1: return "miss";
    case ErrorClass::Type2: return "false-alarm";
  }
  return "?";
}

ErrorClass classify(bool metric_significant, HumanVerdict human) {
  const bool human_significant = human != HumanVerdict::Insignificant;
  if (!metric_significant && human_significant) return ErrorClass::Type1;
  if (metric_significant && !human_significant) return ErrorClass::Type2;
  return ErrorClass::None;
}

// ---------------------------------------------------------------------------

BinEdges::BinEdges(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.empty() || edges_.front() != 0.0) {
    throw Error(ErrorKind::InvalidInput, "bin edges must start at 0");
  }
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1]) || !std::isfinite(edges_[i])) {
      throw Error(ErrorKind::InvalidInput, "bin edges must be finite and strictly increasing");
    }
  }
}

BinEdges BinEdges::defaults() { return BinEdges(std::vector<double>{0, 1, 2, 3, 5, 10}); }

BinEdges BinEdges::for_metric(const MetricId& metric) {
  return metric == "TER" ? defaults().scaled(0.01) : defaults();
}

BinEdges BinEdges::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidInput, "bin scale must be > 0");
  std::vector<double> e = edges_;
  for (auto& x : e) x *= factor;
  return BinEdges(std::move(e));
}

std::size_t BinEdges::bin_index(double delta) const {
  if (!(delta >= 0.0)) throw Error(ErrorKind::Range, "bin lookup needs a non-negative delta");
  auto it = std::upper_bound(edges_.begin(), edges_.end(), delta);
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

namespace {

std::string format_edge(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string label_for(const std::vector<double>& edges, std::size_t i) {
  const std::string hi = i + 1 < edges.size() ? format_edge(edges[i + 1]) : "inf";
  return "[" + format_edge(edges[i]) + "," + hi + ")";
}

}  // namespace

std::string BinEdges::label(double delta) const { return label_for(edges_, bin_index(delta)); }

std::vector<std::string> BinEdges::labels() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < edges_.size(); ++i) out.push_back(label_for(edges_, i));
  out.push_back(kNotSignificantBin);
  return out;
}

// ---------------------------------------------------------------------------

BootstrapComparator::BootstrapComparator(StatsMetric metric, const EvalCorpus& corpus,
                                         BootstrapOptions options)
    : metric_(std::move(metric)), options_(options) {
  for (const auto& [id, hyps] : corpus.systems()) {
    tables_.emplace(id, segment_stats(metric_, hyps, corpus.references()));
  }
}

std::set<SystemId> BootstrapComparator::systems() const {
  std::set<SystemId> out;
  for (const auto& [id, _] : tables_) out.insert(id);
  return out;
}

Comparison BootstrapComparator::compare(const SystemId& a, const SystemId& b) const {
  auto ia = tables_.find(a);
  auto ib = tables_.find(b);
  if (ia == tables_.end() || ib == tables_.end()) {
    throw Error(ErrorKind::MissingData, metric_.id + ": no output for '" +
                                            (ia == tables_.end() ? a : b) + "'");
  }
  Comparison c;
  c.test = paired_bootstrap_stats(metric_, ia->second, ib->second, options_);
  c.delta = c.test.statistic;
  return c;
}

SegmentComparator::SegmentComparator(const ScoreMatrix& matrix, MetricId metric,
                                     SignificanceTest test, double alpha)
    : metric_(std::move(metric)), test_(test), alpha_(alpha) {
  if (test_ == SignificanceTest::PairedBootstrap) {
    throw Error(ErrorKind::InvalidInput,
                metric_ + ": the bootstrap needs corpus statistics, not segment scores");
  }
  sign_ = orientation_sign(matrix.orientation(metric_));
  for (const auto& [key, values] : matrix.segment_level()) {
    if (key.first == metric_) scores_.emplace(key.second, values);
  }
  if (scores_.empty()) {
    throw Error(ErrorKind::MissingData, metric_ + " has no segment-level scores");
  }
}

std::set<SystemId> SegmentComparator::systems() const {
  std::set<SystemId> out;
  for (const auto& [id, _] : scores_) out.insert(id);
  return out;
}

Comparison SegmentComparator::compare(const SystemId& a, const SystemId& b) const {
  auto ia = scores_.find(a);
  auto ib = scores_.find(b);
  if (ia == scores_.end() || ib == scores_.end()) {
    throw Error(ErrorKind::MissingData, metric_ + ": no segment scores for '" +
                                            (ia == scores_.end() ? a : b) + "'");
  }
  std::vector<double> xa = ia->second;
  std::vector<double> xb = ib->second;
  for (auto& x : xa) x *= sign_;
  for (auto& x : xb) x *= sign_;

  Comparison c;
  if (test_ == SignificanceTest::PairedTTest) {
    c.test = paired_t_test(xa, xb, alpha_);
  } else {
    c.test = wilcoxon_rank_sum(xa, xb, alpha_);
  }
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  c.delta = mean(xa) - mean(xb);
  return c;
}

HumanJudge::HumanJudge(const HumanAssessment& assessment, double alpha) : alpha_(alpha) {
  for (const auto& id : assessment.systems()) z_.emplace(id, assessment.z_scores(id));
}

std::set<SystemId> HumanJudge::systems() const {
  std::set<SystemId> out;
  for (const auto& [id, _] : z_) out.insert(id);
  return out;
}

TestResult HumanJudge::test(const SystemId& a, const SystemId& b) const {
  auto ia = z_.find(a);
  auto ib = z_.find(b);
  if (ia == z_.end() || ib == z_.end()) {
    throw Error(ErrorKind::MissingData,
                "no human scores for '" + (ia == z_.end() ? a : b) + "'");
  }
  return wilcoxon_rank_sum(ia->second, ib->second, alpha_);
}

HumanVerdict HumanJudge::verdict(const SystemId& a, const SystemId& b) const {
  switch (test(a, b).direction) {
    case Direction::FirstBetter: return HumanVerdict::FirstBetter;
    case Direction::SecondBetter: return HumanVerdict::SecondBetter;
    case Direction::None: break;
  }
  return HumanVerdict::Insignificant;
}

// ---------------------------------------------------------------------------

PairDecision decide_pair(const SystemComparator& metric, const HumanJudge& human,
                         const SystemId& a, const SystemId& b, const BinEdges& bins,
                         const std::string& language_pair) {
  if (a == b) throw Error(ErrorKind::InvalidInput, "cannot compare '" + a + "' with itself");
  Comparison c = metric.compare(a, b);

  PairDecision d;
  d.language_pair = language_pair;
  d.metric = metric.metric();
  d.a = a;
  d.b = b;
  if (c.delta < 0.0 || (c.delta == 0.0 && b < a)) {
    std::swap(d.a, d.b);
    c.delta = -c.delta;
  }
  d.delta = c.delta;
  d.metric_significant = c.test.significant;
  d.metric_p = c.test.p_value;
  d.bin = d.metric_significant ? bins.label(d.delta) : kNotSignificantBin;

  const TestResult h = human.test(d.a, d.b);
  d.human_p = h.p_value;
  d.human = h.direction == Direction::FirstBetter    ? HumanVerdict::FirstBetter
            : h.direction == Direction::SecondBetter ? HumanVerdict::SecondBetter
                                                     : HumanVerdict::Insignificant;
  d.error = classify(d.metric_significant, d.human);
  return d;
}

namespace {

const BinEdges& edges_for(const std::map<MetricId, BinEdges>& bins, const MetricId& metric,
                          std::map<MetricId, BinEdges>& fallback) {
  if (auto it = bins.find(metric); it != bins.end()) return it->second;
  auto [it, _] = fallback.try_emplace(metric, BinEdges::for_metric(metric));
  return it->second;
}

}  // namespace

BinnedSummary summarize(const std::vector<PairDecision>& decisions,
                        const std::map<MetricId, BinEdges>& bins) {
  BinnedSummary summary;
  std::map<MetricId, BinEdges> fallback;
  for (const auto& d : decisions) {
    auto [it, fresh] = summary.try_emplace(d.metric);
    if (fresh) {
      for (const auto& label : edges_for(bins, d.metric, fallback).labels()) it->second[label];
    }
    auto& counts = it->second[d.bin];
    switch (d.human) {
      case HumanVerdict::FirstBetter: ++counts.human_better; break;
      case HumanVerdict::SecondBetter: ++counts.human_worse; break;
      case HumanVerdict::Insignificant: ++counts.human_insignificant; break;
    }
  }
  return summary;
}

PairwiseAnalysis analyze_all_pairs(const std::vector<LanguagePairInput>& inputs,
                                   const std::map<MetricId, BinEdges>& bins) {
  PairwiseAnalysis out;
  std::map<MetricId, BinEdges> fallback;
  for (const auto& in : inputs) {
    if (in.human == nullptr) {
      throw Error(ErrorKind::InvalidInput, in.language_pair + ": no human assessment");
    }
    std::set<SystemId> systems = in.human->systems();
    for (const auto* m : in.metrics) {
      std::set<SystemId> keep;
      const auto known = m->systems();
      std::set_intersection(systems.begin(), systems.end(), known.begin(), known.end(),
                            std::inserter(keep, keep.end()));
      systems = std::move(keep);
    }
    if (!in.subset.empty()) {
      std::erase_if(systems, [&](const SystemId& s) { return !in.subset.count(s); });
    }
    if (systems.size() < 2) {
      throw Error(ErrorKind::InsufficientData,
                  in.language_pair + ": fewer than 2 systems to compare");
    }
    const std::vector<SystemId> ordered(systems.begin(), systems.end());
    for (const auto* m : in.metrics) {
      const BinEdges& edges = edges_for(bins, m->metric(), fallback);
      for (std::size_t i = 0; i < ordered.size(); ++i) {
        for (std::size_t j = i + 1; j < ordered.size(); ++j) {
          out.decisions.push_back(
              decide_pair(*m, *in.human, ordered[i], ordered[j], edges, in.language_pair));
          ++out.pairs_per_metric[m->metric()];
        }
      }
    }
  }
  std::sort(out.decisions.begin(), out.decisions.end(),
            [](const PairDecision& x, const PairDecision& y) {
              return std::tie(x.metric, x.language_pair, x.a, x.b) <
                     std::tie(y.metric, y.language_pair, y.a, y.b);
            });
  out.summary = summarize(out.decisions, bins);
  return out;
}

// ---------------------------------------------------------------------------

std::size_t AgreementMatrix::at(const MetricId& row, const MetricId& col) const {
  auto find = [&](const MetricId& m) {
    auto it = std::find(metrics.begin(), metrics.end(), m);
    if (it == metrics.end()) throw Error(ErrorKind::MissingData, "metric '" + m + "' not in matrix");
    return static_cast<std::size_t>(it - metrics.begin());
  };
  return counts[find(row)][find(col)];
}

AgreementMatrix agreement_matrix(const std::vector<PairDecision>& decisions) {
  using PairKey = std::tuple<std::string, SystemId, SystemId>;
  std::map<MetricId, std::map<PairKey, bool>> errs;
  for (const auto& d : decisions) {
    const PairKey key{d.language_pair, std::min(d.a, d.b), std::max(d.a, d.b)};
    if (!errs[d.metric].emplace(key, d.error != ErrorClass::None).second) {
      throw Error(ErrorKind::DuplicateKey, d.metric + " decided " + d.language_pair + " " +
                                               std::get<1>(key) + " vs " + std::get<2>(key) +
                                               " twice");
    }
  }

  AgreementMatrix m;
  for (const auto& [metric, _] : errs) m.metrics.push_back(metric);
  const std::size_t k = m.metrics.size();
  m.counts.assign(k, std::vector<std::size_t>(k, 0));
  if (k == 0) return m;

  const auto& reference = errs.begin()->second;
  m.pairs = reference.size();
  for (const auto& [metric, table] : errs) {
    bool same = table.size() == reference.size();
    for (auto it = table.begin(), jt = reference.begin(); same && it != table.end(); ++it, ++jt) {
      same = it->first == jt->first;
    }
    if (!same) {
      throw Error(ErrorKind::Coverage, metric + " and " + errs.begin()->first +
                                           " were not decided on the same system pairs");
    }
  }

  std::vector<const std::map<PairKey, bool>*> tables;
  for (const auto& [_, table] : errs) tables.push_back(&table);
  std::vector<std::map<PairKey, bool>::const_iterator> its;
  for (const auto* t : tables) its.push_back(t->begin());
  for (std::size_t p = 0; p < m.pairs; ++p) {
    for (std::size_t i = 0; i < k; ++i) {
      if (!its[i]->second) continue;
      ++m.counts[i][i];
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i && !its[j]->second) ++m.counts[i][j];
      }
    }
    for (auto& it : its) ++it;
  }
  return m;
}

}  // namespace mtmeta
