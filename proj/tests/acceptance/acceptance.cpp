// Always-runnable acceptance checks. One PASS/FAIL line per criterion; the
// process exits nonzero when any line fails.
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mtmeta/meta_eval.hpp"
#include "mtmeta/metrics.hpp"
#include "mtmeta/pairwise.hpp"
#include "mtmeta/robust_stats.hpp"
#include "mtmeta/significance.hpp"
#include "oracles/oracles.hpp"

using namespace mtmeta;

namespace {

// Tolerances and time budgets, fixed here rather than tuned per run.
constexpr double kMetricTol = 1e-9;
constexpr double kStatsTol = 1e-6;
constexpr double kAffineTol = 1e-12;
constexpr double kMetricBudget = 30.0;
constexpr double kStatsBudget = 10.0;
constexpr double kInvariantBudget = 30.0;
constexpr double kDegenerateBudget = 5.0;
constexpr double kPairCountBudget = 30.0;

constexpr std::size_t kMicroCorpora = 500;
constexpr std::size_t kStatFixtures = 100;
constexpr std::size_t kPairFixtures = 1000;
constexpr std::size_t kExpectedPairs = 1362;

/// Collects mismatches for one criterion; only the first few are kept.
class Failures {
 public:
  void add(const std::string& what) {
    if (count_++ < 3) notes_.push_back(what);
  }
  template <typename T>
  void expect_near(double got, T want, double tol, const std::string& what) {
    const double w = static_cast<double>(want);
    if (!(std::fabs(got - w) <= tol)) {
      std::ostringstream s;
      s << std::setprecision(17) << what << ": got " << got << ", want " << w;
      add(s.str());
    }
  }
  void expect(bool ok, const std::string& what) {
    if (!ok) add(what);
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::string out = std::to_string(count_) + " mismatch(es)";
    for (const auto& n : notes_) out += "; " + n;
    return out;
  }

 private:
  std::size_t count_ = 0;
  std::vector<std::string> notes_;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failed = 0;

void run(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("unexpected exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    out.pass = false;
    out.detail += " (over the " + std::to_string(budget_s) + " s budget)";
  }
  if (!out.pass) ++failed;
  std::cout << (out.pass ? "PASS " : "FAIL ") << name << " [" << std::fixed
            << std::setprecision(2) << secs << " s] " << out.detail << std::endl;
}

oracle::Tokens random_tokens(std::mt19937_64& gen, std::size_t max_len) {
  static const char* vocab[] = {"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<std::size_t> len(0, max_len), word(0, 4);
  oracle::Tokens t(len(gen));
  for (auto& w : t) w = vocab[word(gen)];
  return t;
}

std::string join(const oracle::Tokens& t) {
  std::string out;
  for (const auto& w : t) out += (out.empty() ? "" : " ") + w;
  return out;
}

template <typename F>
bool throws_kind(F&& f, ErrorKind kind) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
  Failures f;
  std::mt19937_64 gen(20240601);
  std::size_t ter_segments = 0;
  for (std::size_t c = 0; c < kMicroCorpora; ++c) {
    const std::size_t segments = 1 + gen() % 4;
    std::vector<std::string> hyps, refs;
    std::vector<oracle::Tokens> th, tr;
    for (std::size_t s = 0; s < segments; ++s) {
      auto h = random_tokens(gen, 5);
      auto r = random_tokens(gen, 5);
      if (r.empty()) r.push_back("a");
      th.push_back(h);
      tr.push_back(r);
      hyps.push_back(join(h));
      refs.push_back(join(r));
    }
    const std::string tag = "corpus " + std::to_string(c);
    f.expect_near(corpus_bleu(hyps, refs).value, oracle::bleu(th, tr), kMetricTol, tag + " BLEU");
    f.expect_near(corpus_bleu(hyps, refs, 4, BleuSmoothing::ExpFloor).value,
                  oracle::bleu(th, tr, 4, true), kMetricTol, tag + " smoothed BLEU");
    for (std::size_t s = 0; s < segments; ++s) {
      const double want = static_cast<double>(oracle::greedy_ter_edits(th[s], tr[s])) /
                          static_cast<double>(tr[s].size());
      f.expect_near(ter(hyps[s], refs[s]).value, want, kMetricTol, tag + " TER");
      f.expect_near(sentence_chrf(hyps[s], refs[s]).value, oracle::chrf(hyps[s], refs[s]),
                    kMetricTol, tag + " chrF");
      ++ter_segments;
    }
  }
  return {f.ok(), std::to_string(kMicroCorpora) + " corpora, " + std::to_string(ter_segments) +
                      " segments; " + f.summary()};
}

std::pair<double, double> williams_oracle(long double r12, long double r13, long double r23,
                                          int n) {
  const long double k = 1 - r12 * r12 - r13 * r13 - r23 * r23 + 2 * r12 * r13 * r23;
  const long double num = (n - 1) * (1 + r23);
  const long double den =
      2 * k * (n - 1) / (n - 3) + (r12 + r13) * (r12 + r13) / 4 * std::pow(1 - r23, 3);
  const double t = static_cast<double>((r12 - r13) * std::sqrt(num / den));
  boost::math::students_t dist(n - 3);
  return {t, boost::math::cdf(boost::math::complement(dist, t))};
}

Outcome statistics_oracles() {
  Failures f;
  std::mt19937_64 gen(77);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> small(2, 8), coarse(0, 5);

  for (std::size_t i = 0; i < kStatFixtures; ++i) {
    // Coarse values on half the fixtures so the tie correction is exercised.
    const bool ties = i % 2 == 0;
    std::vector<double> a(small(gen)), b(small(gen));
    for (auto& v : a) v = ties ? coarse(gen) : nd(gen);
    for (auto& v : b) v = ties ? coarse(gen) + 0.5 * (i % 3) : nd(gen) + 0.3;
    const double want = static_cast<double>(oracle::wilcoxon_exact_p(a, b));
    const auto got = wilcoxon_rank_sum(a, b);
    f.expect_near(got.p_value, want, kStatsTol, "Wilcoxon fixture " + std::to_string(i));
    f.expect_near(wilcoxon_exact_p(a, b), want, kStatsTol, "exact path " + std::to_string(i));
  }

  for (std::size_t i = 0; i < kStatFixtures; ++i) {
    const std::size_t m = 2 + i % 40;
    std::vector<double> a(m), b(m);
    for (std::size_t k = 0; k < m; ++k) {
      a[k] = nd(gen);
      b[k] = a[k] + 0.4 * nd(gen) + 0.1 * static_cast<double>(i % 5);
    }
    std::vector<double> d(m);
    for (std::size_t k = 0; k < m; ++k) d[k] = a[k] - b[k];
    long double mean = 0, ss = 0;
    for (double v : d) mean += v;
    mean /= m;
    for (double v : d) ss += (v - mean) * (v - mean);
    const double t = static_cast<double>(mean / std::sqrt(ss / (m - 1) / m));
    boost::math::students_t dist(static_cast<double>(m - 1));
    const double p = 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
    f.expect_near(paired_t_test(a, b).p_value, p, kStatsTol, "t-test fixture " + std::to_string(i));
  }

  for (std::size_t i = 0; i < kStatFixtures; ++i) {
    // Correlations taken from real samples keep the 3x3 matrix valid.
    const std::size_t n = 5 + i % 30;
    std::vector<double> h(n), m1(n), m2(n);
    for (std::size_t k = 0; k < n; ++k) {
      h[k] = nd(gen);
      m1[k] = h[k] + 0.5 * nd(gen);
      m2[k] = h[k] + 0.9 * nd(gen);
    }
    const double r12 = pearson(h, m1), r13 = pearson(h, m2), r23 = pearson(m1, m2);
    const auto [t, p] = williams_oracle(r12, r13, r23, static_cast<int>(n));
    const auto got = williams_test(r12, r13, r23, n);
    f.expect_near(got.p, p, kStatsTol, "Williams fixture " + std::to_string(i));
    f.expect_near(got.t, t, kStatsTol * (1 + std::fabs(t)), "Williams t " + std::to_string(i));
  }
  return {f.ok(), std::to_string(kStatFixtures) + " fixtures per test; " + f.summary()};
}

// ---------------------------------------------------------------------------

class ScriptedComparator : public SystemComparator {
 public:
  ScriptedComparator(MetricId id, std::map<SystemId, double> strength, double threshold)
      : id_(std::move(id)), strength_(std::move(strength)), threshold_(threshold) {}
  const MetricId& metric() const override { return id_; }
  std::set<SystemId> systems() const override {
    std::set<SystemId> out;
    for (const auto& kv : strength_) out.insert(kv.first);
    return out;
  }
  Comparison compare(const SystemId& a, const SystemId& b) const override {
    const double d = strength_.at(a) - strength_.at(b);
    const bool sig = std::fabs(d) >= threshold_;
    return {d, make_test_result(TestMethod::PairedTTest, d, sig ? 0.001 : 0.5, 0.05, d)};
  }

 private:
  MetricId id_;
  std::map<SystemId, double> strength_;
  double threshold_;
};

HumanAssessment assessment(const std::map<SystemId, double>& means, std::mt19937_64& gen,
                           std::size_t per_system = 20) {
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<DaRecord> records;
  for (const auto& [sys, mu] : means) {
    for (std::size_t i = 0; i < per_system; ++i) {
      DaRecord r;
      r.system = sys;
      r.segment = i;
      r.annotator = "a";
      r.z = mu + noise(gen);
      records.push_back(r);
    }
  }
  return HumanAssessment(std::move(records));
}

EvalCorpus synthetic_corpus(std::mt19937_64& gen, std::size_t segments) {
  std::vector<std::string> src, ref, good, bad;
  for (std::size_t i = 0; i < segments; ++i) {
    auto r = random_tokens(gen, 12);
    r.push_back("z");
    auto g = r;
    if (gen() % 3 == 0) g[gen() % g.size()] = "q";
    ref.push_back(join(r));
    src.push_back("s" + std::to_string(i));
    good.push_back(join(g));
    bad.push_back(join(random_tokens(gen, 12)));
  }
  return EvalCorpus("xx-yy", src, ref, {{"good", good}, {"bad", bad}});
}

Outcome invariants() {
  Failures f;
  std::mt19937_64 gen(4242);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-50.0, 50.0);

  // Pearson under affine maps of either argument.
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 3 + i % 25;
    std::vector<double> x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = nd(gen);
      y[k] = 0.6 * x[k] + nd(gen);
    }
    const double r = pearson(x, y);
    const double a = scale(gen), b = shift(gen);
    std::vector<double> xp(n), xn(n);
    for (std::size_t k = 0; k < n; ++k) {
      xp[k] = a * x[k] + b;
      xn[k] = -a * x[k] + b;
    }
    f.expect_near(pearson(xp, y), r, kAffineTol, "affine +");
    f.expect_near(pearson(xn, y), -r, kAffineTol, "affine -");
    f.expect_near(pearson(y, xp), r, kAffineTol, "affine swapped");
  }

  // Outlier sets unchanged by positive affine transforms of the scores.
  std::cauchy_distribution<double> heavy;
  for (int i = 0; i < 300; ++i) {
    std::map<SystemId, double> s, t;
    const std::size_t n = 3 + i % 20;
    const double a = scale(gen), b = shift(gen);
    for (std::size_t k = 0; k < n; ++k) {
      const double v = heavy(gen);
      s["sys" + std::to_string(k)] = v;
      t["sys" + std::to_string(k)] = a * v + b;
    }
    const auto r1 = detect_outliers(s), r2 = detect_outliers(t);
    f.expect(r1.outliers == r2.outliers, "outlier set moved under affine map");
  }

  // Top-N at N = all equals the full correlation.
  for (int i = 0; i < 200; ++i) {
    std::map<SystemId, double> da, m;
    const std::size_t n = 4 + i % 20;
    std::vector<double> x, y;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = nd(gen), w = v + nd(gen);
      da["s" + std::to_string(k)] = v;
      m["s" + std::to_string(k)] = w;
    }
    for (const auto& [k, v] : da) {
      x.push_back(v);
      y.push_back(m.at(k));
    }
    const auto curve = topn_curve(da, m);
    const auto all = std::find_if(curve.begin(), curve.end(),
                                  [&](const CurvePoint& p) { return p.key == n; });
    const bool found = all != curve.end() && all->r.has_value();
    f.expect(found, "top-N curve lacks N = all");
    if (found) f.expect_near(*all->r, pearson(x, y), kAffineTol, "top-N at all");
  }

  // Error classes partition the decisions; every decision lands in one bin.
  std::vector<PairDecision> decisions;
  std::uniform_real_distribution<double> strength(-15.0, 15.0), threshold(0.0, 8.0);
  std::uniform_real_distribution<double> human_mean(-1.0, 1.0);
  for (std::size_t i = 0; i < kPairFixtures; ++i) {
    const double sa = strength(gen), sb = strength(gen);
    ScriptedComparator metric("M" + std::to_string(i % 3), {{"A", sa}, {"B", sb}}, threshold(gen));
    const auto human = assessment({{"A", human_mean(gen)}, {"B", human_mean(gen)}}, gen);
    HumanJudge judge(human);
    const auto d = decide_pair(metric, judge, "A", "B", BinEdges::defaults(), "lp");
    const bool human_sig = d.human != HumanVerdict::Insignificant;
    const bool type1 = !d.metric_significant && human_sig;
    const bool type2 = d.metric_significant && !human_sig;
    const int classes = (d.error == ErrorClass::Type1) + (d.error == ErrorClass::Type2) +
                        (d.error == ErrorClass::None);
    f.expect(classes == 1, "decision without exactly one class");
    f.expect((d.error == ErrorClass::Type1) == type1, "type-1 rule broken");
    f.expect((d.error == ErrorClass::Type2) == type2, "type-2 rule broken");
    f.expect(d.error == classify(d.metric_significant, d.human), "classify mismatch");
    f.expect(d.delta >= 0.0, "winner not first");
    const auto labels = BinEdges::defaults().labels();
    if (d.metric_significant) {
      f.expect(d.bin == BinEdges::defaults().label(d.delta), "bin label mismatch");
      f.expect(std::count(labels.begin(), labels.end(), d.bin) == 1, "bin not among labels");
    } else {
      f.expect(d.bin == kNotSignificantBin, "insignificant pair outside NS");
    }
    decisions.push_back(d);
  }
  std::size_t binned = 0;
  for (const auto& [metric, bins] : summarize(decisions)) {
    for (const auto& [label, counts] : bins) binned += counts.total();
  }
  f.expect(binned == kPairFixtures, "summary total " + std::to_string(binned));

  // Bitwise bootstrap determinism, including a freshly built comparator.
  const auto corpus = synthetic_corpus(gen, 60);
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 987654321ull}) {
    const BootstrapOptions opts{1000, seed, 0.05};
    const auto r1 = paired_bootstrap(bleu_metric(), corpus, "good", "bad", opts);
    const auto r2 = paired_bootstrap(bleu_metric(), corpus, "good", "bad", opts);
    f.expect(std::memcmp(&r1.p_value, &r2.p_value, sizeof(double)) == 0 &&
                 std::memcmp(&r1.statistic, &r2.statistic, sizeof(double)) == 0 && r1 == r2,
             "bootstrap differs across runs, seed " + std::to_string(seed));
    const BootstrapComparator c1(chrf_macro_metric(), corpus, opts), c2(chrf_macro_metric(), corpus, opts);
    const auto x = c1.compare("good", "bad"), y = c2.compare("good", "bad");
    f.expect(std::memcmp(&x.delta, &y.delta, sizeof(double)) == 0 && x.test == y.test,
             "comparator bootstrap differs, seed " + std::to_string(seed));
  }
  return {f.ok(), f.summary()};
}

// ---------------------------------------------------------------------------

Outcome degenerate() {
  Failures f;
  const double inf = std::numeric_limits<double>::infinity();

  // MAD = 0: values at the median get z = 0, others +-inf and are flagged.
  const auto r = detect_outliers({{"A", 1}, {"B", 1}, {"C", 1}, {"D", 9}, {"E", -2}});
  f.expect(r.mad == 0.0, "MAD not zero");
  f.expect(r.z.at("A") == 0.0 && r.z.at("D") == inf && r.z.at("E") == -inf, "MAD=0 z values");
  f.expect(r.outliers == std::set<SystemId>{"D", "E"}, "MAD=0 outliers");
  const auto flat = detect_outliers({{"A", 3}, {"B", 3}, {"C", 3}});
  f.expect(flat.outliers.empty() && flat.retained.size() == 3, "constant scores flagged");
  for (const auto& [s, z] : flat.z) f.expect(z == 0.0, "constant z for " + s);
  f.expect(throws_kind([] { detect_outliers({{"A", 1}, {"B", 2}}); }, ErrorKind::InsufficientData),
           "two systems accepted");

  // Zero variance: undefined correlation, never NaN.
  const std::vector<double> c{2, 2, 2, 2}, x{1, 2, 3, 4};
  f.expect(throws_kind([&] { pearson(c, x); }, ErrorKind::UndefinedCorrelation), "pearson constant");
  std::map<SystemId, double> da{{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}};
  std::map<SystemId, double> constant{{"a", 5}, {"b", 5}, {"c", 5}, {"d", 5}};
  f.expect(!correlation_over(da, constant, {"a", "b", "c", "d"}).has_value(),
           "constant metric gave a value");
  ScoreMatrix matrix;
  for (const auto& [s, v] : constant) matrix.set_system_score("FLAT", s, v);
  for (const auto& [s, v] : da) matrix.set_system_score("GOOD", s, v);
  const auto table = correlations_with_without_outliers("xx", da, matrix);
  f.expect(!table.find("FLAT", Condition::All)->r.has_value(), "FLAT entry defined");
  f.expect(table.find("GOOD", Condition::All)->r == 1.0, "GOOD entry");
  const auto curve = rolling_window_curve(da, constant, 3);
  for (const auto& p : curve.points) f.expect(!p.r.has_value(), "window r on constant metric");

  // Empty hypotheses score as documented.
  const std::vector<std::string> empty_hyps{"", " "}, refs{"a b c", "d e"};
  f.expect(corpus_bleu(empty_hyps, refs).value == 0.0, "BLEU of empty hypotheses");
  f.expect(sentence_bleu("", "a b").value == 0.0, "sentence BLEU of empty hypothesis");
  f.expect(ter("", "a b c").value == 1.0, "TER of empty hypothesis");
  f.expect(corpus_ter(empty_hyps, refs).value == 1.0, "corpus TER of empty hypotheses");
  f.expect(sentence_chrf("", "abc").value == 0.0, "chrF of empty hypothesis");
  f.expect(corpus_chrf(empty_hyps, refs).value == 0.0, "corpus chrF of empty hypotheses");
  f.expect(throws_kind([] { ter("a", ""); }, ErrorKind::InvalidInput), "TER empty reference");
  f.expect(throws_kind([] { sentence_chrf("a", ""); }, ErrorKind::InvalidInput), "chrF empty reference");
  const std::vector<std::string> none;
  f.expect(throws_kind([&] { corpus_bleu(none, none); }, ErrorKind::InvalidInput), "empty corpus");

  // Degenerate significance inputs.
  const std::vector<double> same{1, 2, 3};
  f.expect(paired_t_test(same, same).p_value == 1.0, "t-test on identical samples");
  const auto w = wilcoxon_rank_sum(same, same);
  f.expect(std::isfinite(w.p_value) && w.p_value == 1.0, "Wilcoxon on identical samples");
  const auto all_tied = wilcoxon_rank_sum(std::vector<double>(20, 1.0), std::vector<double>(20, 1.0));
  f.expect(std::isfinite(all_tied.p_value), "Wilcoxon NaN on all ties");
  return {f.ok(), f.summary()};
}

// ---------------------------------------------------------------------------

Outcome synthetic_pair_count() {
  // Systems per language pair in the WMT19 DA evaluation.
  const std::vector<std::pair<std::string, std::size_t>> counts{
      {"de-cs", 11}, {"de-fr", 11}, {"fr-de", 10}, {"de-en", 16}, {"fi-en", 12}, {"gu-en", 11},
      {"kk-en", 11}, {"lt-en", 11}, {"ru-en", 14}, {"zh-en", 15}, {"en-cs", 11}, {"en-de", 22},
      {"en-fi", 12}, {"en-gu", 11}, {"en-kk", 11}, {"en-lt", 12}, {"en-ru", 12}, {"en-zh", 12}};
  std::mt19937_64 gen(1362);
  std::normal_distribution<double> nd;
  std::vector<HumanJudge> judges;
  std::vector<std::unique_ptr<ScriptedComparator>> comparators;
  judges.reserve(counts.size());
  std::vector<LanguagePairInput> inputs;
  for (const auto& [lp, n] : counts) {
    std::map<SystemId, double> means, bleu, chrf;
    for (std::size_t k = 0; k < n; ++k) {
      const std::string id = lp + "-sys" + std::to_string(k);
      means[id] = 0.3 * nd(gen);
      bleu[id] = 30 + 5 * nd(gen);
      chrf[id] = 55 + 4 * nd(gen);
    }
    judges.emplace_back(assessment(means, gen));
    comparators.push_back(std::make_unique<ScriptedComparator>("BLEU", bleu, 1.0));
    comparators.push_back(std::make_unique<ScriptedComparator>("chrF", chrf, 1.0));
    inputs.push_back({lp, &judges.back(), {comparators[comparators.size() - 2].get(),
                                           comparators.back().get()}, {}});
  }
  const auto analysis = analyze_all_pairs(inputs);
  Failures f;
  for (const char* m : {"BLEU", "chrF"}) {
    const auto it = analysis.pairs_per_metric.find(m);
    const std::size_t got = it == analysis.pairs_per_metric.end() ? 0 : it->second;
    f.expect(got == kExpectedPairs, std::string(m) + " pairs " + std::to_string(got));
  }
  f.expect(analysis.decisions.size() == 2 * kExpectedPairs, "decision rows");
  return {f.ok(), std::to_string(counts.size()) + " language pairs; " + f.summary()};
}

}  // namespace

int main() {
  run("metric-oracle-equivalence", kMetricBudget, metric_oracles);
  run("statistics-oracle-equivalence", kStatsBudget, statistics_oracles);
  run("invariant-suites", kInvariantBudget, invariants);
  run("degenerate-handling", kDegenerateBudget, degenerate);
  run("pair-count-synthetic", kPairCountBudget, synthetic_pair_count);
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion/criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
