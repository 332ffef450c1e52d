#include <algorithm>
#include <string>
#include <unordered_map>

#include "mtmeta/metrics.hpp"

namespace mtmeta {

namespace {

bool is_ascii_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f';
}

std::unordered_map<std::u32string, std::int64_t> char_ngrams(const std::vector<char32_t>& chars,
                                                             std::size_t n) {
  std::unordered_map<std::u32string, std::int64_t> counts;
  if (chars.size() < n) return counts;
  for (std::size_t i = 0; i + n <= chars.size(); ++i) {
    ++counts[std::u32string(chars.begin() + static_cast<std::ptrdiff_t>(i),
                            chars.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

std::vector<char32_t> chrf_characters(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF8) {
      len = 1;
    } else if (b0 >= 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    }
    bool valid = len == 1 ? b0 < 0x80 : i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) valid = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!valid) {
      // Malformed byte: keep it as a distinct code point in the low-surrogate
      // escape range so matching still works byte-for-byte.
      cp = 0xDC00 + b0;
      len = 1;
    }
    if (!is_ascii_space(cp)) out.push_back(cp);
    i += len;
  }
  return out;
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  for (std::size_t n = 0; n < matches.size(); ++n) {
    matches[n] += other.matches[n];
    hyp_counts[n] += other.hyp_counts[n];
    ref_counts[n] += other.ref_counts[n];
  }
  return *this;
}

ChrfStats chrf_stats(std::string_view hypothesis, std::string_view reference, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::InvalidInput, "n_max must be >= 1");
  const auto hyp = chrf_characters(hypothesis);
  const auto ref = chrf_characters(reference);
  ChrfStats s(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const auto h = char_ngrams(hyp, n);
    const auto r = char_ngrams(ref, n);
    std::int64_t matched = 0;
    for (const auto& [gram, count] : h) {
      auto it = r.find(gram);
      if (it != r.end()) matched += std::min(count, it->second);
    }
    s.matches[n - 1] = matched;
    s.hyp_counts[n - 1] = hyp.size() >= static_cast<std::size_t>(n)
                              ? static_cast<std::int64_t>(hyp.size()) - n + 1
                              : 0;
    s.ref_counts[n - 1] = ref.size() >= static_cast<std::size_t>(n)
                              ? static_cast<std::int64_t>(ref.size()) - n + 1
                              : 0;
  }
  return s;
}

double chrf_from_stats(const ChrfStats& stats, double beta) {
  if (stats.reference_chars() == 0) {
    throw Error(ErrorKind::InvalidInput, "chrF: reference has no characters");
  }
  double p_sum = 0.0;
  double r_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < stats.matches.size(); ++n) {
    const auto hc = stats.hyp_counts[n];
    const auto rc = stats.ref_counts[n];
    if (hc == 0 && rc == 0) continue;
    const auto m = static_cast<double>(stats.matches[n]);
    p_sum += hc > 0 ? m / static_cast<double>(hc) : 0.0;
    r_sum += rc > 0 ? m / static_cast<double>(rc) : 0.0;
    ++orders;
  }
  const double p = p_sum / static_cast<double>(orders);
  const double r = r_sum / static_cast<double>(orders);
  if (p == 0.0 && r == 0.0) return 0.0;
  const double b2 = beta * beta;
  const double f = (1.0 + b2) * p * r / (b2 * p + r);
  return std::clamp(100.0 * f, 0.0, 100.0);
}

MetricScore sentence_chrf(std::string_view hypothesis, std::string_view reference, int n_max,
                          double beta) {
  return {"chrF", chrf_from_stats(chrf_stats(hypothesis, reference, n_max), beta),
          ScoreLevel::Segment};
}

MetricScore corpus_chrf(std::span<const std::string> hypotheses,
                        std::span<const std::string> references, ChrfAverage mode, int n_max,
                        double beta) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorKind::Alignment, std::to_string(hypotheses.size()) + " hypotheses vs " +
                                          std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw Error(ErrorKind::InvalidInput, "empty segment sequence");
  if (mode == ChrfAverage::Micro) {
    double sum = 0.0;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
      sum += sentence_chrf(hypotheses[i], references[i], n_max, beta).value;
    }
    return {"chrF", sum / static_cast<double>(hypotheses.size()), ScoreLevel::Corpus};
  }
  ChrfStats pooled(n_max);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    pooled += chrf_stats(hypotheses[i], references[i], n_max);
  }
  return {"chrF", chrf_from_stats(pooled, beta), ScoreLevel::Corpus};
}

StatsMetric chrf_macro_metric(int n_max, double beta) {
  if (n_max < 1) throw Error(ErrorKind::InvalidInput, "n_max must be >= 1");
  StatsMetric m;
  m.id = "chrF";
  m.orientation = Orientation::HigherIsBetter;
  m.width = 3 * static_cast<std::size_t>(n_max);
  m.segment_stats = [n_max](std::string_view hyp, std::string_view ref) {
    const auto s = chrf_stats(hyp, ref, n_max);
    std::vector<double> v;
    for (int n = 0; n < n_max; ++n) {
      v.push_back(static_cast<double>(s.matches[n]));
      v.push_back(static_cast<double>(s.hyp_counts[n]));
      v.push_back(static_cast<double>(s.ref_counts[n]));
    }
    return v;
  };
  m.score = [n_max, beta](std::span<const double> v) -> std::optional<double> {
    ChrfStats s(n_max);
    for (int n = 0; n < n_max; ++n) {
      s.matches[n] = static_cast<std::int64_t>(v[3 * n]);
      s.hyp_counts[n] = static_cast<std::int64_t>(v[3 * n + 1]);
      s.ref_counts[n] = static_cast<std::int64_t>(v[3 * n + 2]);
    }
    if (s.reference_chars() == 0) return std::nullopt;
    return chrf_from_stats(s, beta);
  };
  return m;
}

}  // namespace mtmeta
