#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "mtmeta/metrics.hpp"

namespace mtmeta {

namespace {

// n-grams are keyed by their tokens joined with a separator that cannot occur
// inside a token (tokens never contain whitespace).
std::unordered_map<std::string, std::int64_t> ngram_counts(std::span<const std::string> tokens,
                                                           std::size_t n) {
  std::unordered_map<std::string, std::int64_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

void check_aligned(std::size_t hyps, std::size_t refs) {
  if (hyps != refs) {
    throw Error(ErrorKind::Alignment, std::to_string(hyps) + " hypotheses vs " +
                                          std::to_string(refs) + " references");
  }
  if (hyps == 0) throw Error(ErrorKind::InvalidInput, "empty segment sequence");
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  for (std::size_t n = 0; n < matches.size(); ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  return *this;
}

BleuStats bleu_stats(std::span<const std::string> hyp_tokens,
                     std::span<const std::string> ref_tokens, int max_n) {
  if (max_n < 1) throw Error(ErrorKind::InvalidInput, "max_n must be >= 1");
  BleuStats s(max_n);
  s.hyp_len = static_cast<std::int64_t>(hyp_tokens.size());
  s.ref_len = static_cast<std::int64_t>(ref_tokens.size());
  for (int n = 1; n <= max_n; ++n) {
    const auto hyp = ngram_counts(hyp_tokens, n);
    const auto ref = ngram_counts(ref_tokens, n);
    std::int64_t matched = 0;
    for (const auto& [gram, count] : hyp) {
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    s.matches[n - 1] = matched;
    s.totals[n - 1] = std::max<std::int64_t>(0, s.hyp_len - n + 1);
  }
  return s;
}

double bleu_from_stats(const BleuStats& stats, BleuSmoothing smoothing) {
  if (stats.hyp_len == 0) return 0.0;
  const std::size_t max_n = stats.matches.size();
  double log_sum = 0.0;
  std::size_t orders = 0;
  double floor_divisor = 1.0;
  for (std::size_t n = 0; n < max_n; ++n) {
    const auto total = stats.totals[n];
    const auto matched = stats.matches[n];
    if (smoothing == BleuSmoothing::None) {
      if (total == 0 || matched == 0) return 0.0;
      log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
      ++orders;
      continue;
    }
    // Effective order: orders without candidate n-grams drop out.
    if (total == 0) continue;
    double p = 0.0;
    if (matched == 0) {
      floor_divisor *= 2.0;
      p = 1.0 / (floor_divisor * static_cast<double>(total));
    } else {
      p = static_cast<double>(matched) / static_cast<double>(total);
    }
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double geo = std::exp(log_sum / static_cast<double>(orders));
  const double ratio = static_cast<double>(stats.ref_len) / static_cast<double>(stats.hyp_len);
  const double bp = ratio > 1.0 ? std::exp(1.0 - ratio) : 1.0;
  return std::clamp(100.0 * bp * geo, 0.0, 100.0);
}

MetricScore corpus_bleu(std::span<const std::string> hypotheses,
                        std::span<const std::string> references, int max_n,
                        BleuSmoothing smoothing) {
  check_aligned(hypotheses.size(), references.size());
  if (max_n < 1) throw Error(ErrorKind::InvalidInput, "max_n must be >= 1");
  BleuStats total(max_n);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    total += bleu_stats(tokenize(hypotheses[i]).tokens, tokenize(references[i]).tokens, max_n);
  }
  return {"BLEU", bleu_from_stats(total, smoothing), ScoreLevel::Corpus};
}

MetricScore sentence_bleu(std::string_view hypothesis, std::string_view reference,
                          BleuSmoothing smoothing) {
  const auto s = bleu_stats(tokenize(hypothesis).tokens, tokenize(reference).tokens, 4);
  return {"BLEU", bleu_from_stats(s, smoothing), ScoreLevel::Segment};
}

StatsMetric bleu_metric(int max_n, BleuSmoothing smoothing) {
  if (max_n < 1) throw Error(ErrorKind::InvalidInput, "max_n must be >= 1");
  StatsMetric m;
  m.id = "BLEU";
  m.orientation = Orientation::HigherIsBetter;
  m.width = 2 + 2 * static_cast<std::size_t>(max_n);
  m.segment_stats = [max_n](std::string_view hyp, std::string_view ref) {
    const auto s = bleu_stats(tokenize(hyp).tokens, tokenize(ref).tokens, max_n);
    std::vector<double> v{static_cast<double>(s.hyp_len), static_cast<double>(s.ref_len)};
    for (int n = 0; n < max_n; ++n) {
      v.push_back(static_cast<double>(s.matches[n]));
      v.push_back(static_cast<double>(s.totals[n]));
    }
    return v;
  };
  m.score = [max_n, smoothing](std::span<const double> v) -> std::optional<double> {
    BleuStats s(max_n);
    s.hyp_len = static_cast<std::int64_t>(v[0]);
    s.ref_len = static_cast<std::int64_t>(v[1]);
    for (int n = 0; n < max_n; ++n) {
      s.matches[n] = static_cast<std::int64_t>(v[2 + 2 * n]);
      s.totals[n] = static_cast<std::int64_t>(v[3 + 2 * n]);
    }
    return bleu_from_stats(s, smoothing);
  };
  return m;
}

}  // namespace mtmeta
