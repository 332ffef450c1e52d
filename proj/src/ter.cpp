#include <algorithm>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "mtmeta/metrics.hpp"

namespace mtmeta {

namespace {

/// Levenshtein distance with the reference fixed, so the per-reference bit
/// masks are built once and reused for every shifted hypothesis.
class RefDistance {
 public:
  RefDistance(std::span<const std::uint32_t> ref, std::uint32_t alphabet)
      : ref_(ref.begin(), ref.end()) {
    if (ref_.size() <= 64 && !ref_.empty()) {
      peq_.assign(alphabet, 0);
      for (std::size_t i = 0; i < ref_.size(); ++i) peq_[ref_[i]] |= std::uint64_t{1} << i;
    }
    row_.resize(ref_.size() + 1);
  }

  std::size_t operator()(std::span<const std::uint32_t> hyp) {
    if (ref_.empty()) return hyp.size();
    if (!peq_.empty()) return bit_parallel(hyp);
    return dynamic(hyp);
  }

 private:
  // Myers/Hyyrö bit-vector algorithm, reference length <= 64.
  std::size_t bit_parallel(std::span<const std::uint32_t> hyp) const {
    const std::size_t m = ref_.size();
    const std::uint64_t high = std::uint64_t{1} << (m - 1);
    std::uint64_t pv = ~std::uint64_t{0};
    std::uint64_t mv = 0;
    std::size_t score = m;
    for (std::uint32_t c : hyp) {
      const std::uint64_t eq = c < peq_.size() ? peq_[c] : 0;
      const std::uint64_t xv = eq | mv;
      const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
      std::uint64_t ph = mv | ~(xh | pv);
      std::uint64_t mh = pv & xh;
      if (ph & high) {
        ++score;
      } else if (mh & high) {
        --score;
      }
      ph = (ph << 1) | 1;
      mh <<= 1;
      pv = mh | ~(xv | ph);
      mv = ph & xv;
    }
    return score;
  }

  std::size_t dynamic(std::span<const std::uint32_t> hyp) {
    const std::size_t m = ref_.size();
    std::iota(row_.begin(), row_.end(), std::size_t{0});
    for (std::size_t i = 1; i <= hyp.size(); ++i) {
      std::size_t diag = row_[0];
      row_[0] = i;
      for (std::size_t j = 1; j <= m; ++j) {
        const std::size_t up = row_[j];
        row_[j] = std::min({up + 1, row_[j - 1] + 1, diag + (hyp[i - 1] != ref_[j - 1] ? 1u : 0u)});
        diag = up;
      }
    }
    return row_[m];
  }

  std::vector<std::uint32_t> ref_;
  std::vector<std::uint64_t> peq_;
  std::vector<std::size_t> row_;
};

struct Shift {
  std::size_t distance;
  std::size_t start;
  std::size_t length;
  std::size_t dest;  // insertion index into the sequence with the block removed

  auto key() const { return std::tie(distance, start, length, dest); }
};

void apply_shift(std::span<const std::uint32_t> in, std::size_t start, std::size_t length,
                 std::size_t dest, std::vector<std::uint32_t>& out) {
  out.clear();
  // rest = in without [start, start+length); result = rest[:dest] + block + rest[dest:]
  auto rest_at = [&](std::size_t k) { return k < start ? in[k] : in[k + length]; };
  const std::size_t rest_len = in.size() - length;
  for (std::size_t k = 0; k < dest; ++k) out.push_back(rest_at(k));
  for (std::size_t k = 0; k < length; ++k) out.push_back(in[start + k]);
  for (std::size_t k = dest; k < rest_len; ++k) out.push_back(rest_at(k));
}

std::uint32_t alphabet_size(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::uint32_t mx = 0;
  for (auto v : a) mx = std::max(mx, v);
  for (auto v : b) mx = std::max(mx, v);
  return mx + 1;
}

}  // namespace

std::size_t token_edit_distance(std::span<const std::uint32_t> hyp,
                                std::span<const std::uint32_t> ref) {
  RefDistance dist(ref, alphabet_size(hyp, ref));
  return dist(hyp);
}

TerAlignment ter_align(std::span<const std::uint32_t> hyp, std::span<const std::uint32_t> ref,
                       const TerLimits& limits) {
  RefDistance dist(ref, alphabet_size(hyp, ref));
  std::vector<std::uint32_t> current(hyp.begin(), hyp.end());
  std::vector<std::uint32_t> candidate;
  candidate.reserve(current.size());

  TerAlignment result;
  std::size_t cur = dist(current);
  while (cur > 0) {
    std::optional<Shift> best;
    const std::size_t n = current.size();
    for (std::size_t start = 0; start < n; ++start) {
      const std::size_t max_len = std::min(limits.max_block, n - start);
      for (std::size_t length = 1; length <= max_len; ++length) {
        const std::size_t rest_len = n - length;
        const std::size_t lo = start > limits.max_distance ? start - limits.max_distance : 0;
        const std::size_t hi = std::min(rest_len, start + limits.max_distance);
        for (std::size_t dest = lo; dest <= hi; ++dest) {
          if (dest == start) continue;
          apply_shift(current, start, length, dest, candidate);
          const std::size_t d = dist(candidate);
          if (d >= cur) continue;
          Shift s{d, start, length, dest};
          if (!best || s.key() < best->key()) best = s;
        }
      }
    }
    if (!best) break;
    apply_shift(current, best->start, best->length, best->dest, candidate);
    current.swap(candidate);
    cur = best->distance;
    ++result.shifts;
  }
  result.edit_distance = cur;
  return result;
}

TerAlignment ter_align_tokens(std::span<const std::string> hyp, std::span<const std::string> ref,
                              const TerLimits& limits) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  auto encode = [&](std::span<const std::string> tokens) {
    std::vector<std::uint32_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
      auto [it, _] = ids.emplace(t, static_cast<std::uint32_t>(ids.size()));
      out.push_back(it->second);
    }
    return out;
  };
  const auto r = encode(ref);
  const auto h = encode(hyp);
  return ter_align(h, r, limits);
}

TerStats ter_stats(std::string_view hypothesis, std::string_view reference) {
  const auto h = tokenize(hypothesis).tokens;
  const auto r = tokenize(reference).tokens;
  return {static_cast<std::int64_t>(ter_align_tokens(h, r).edits()),
          static_cast<std::int64_t>(r.size())};
}

MetricScore ter(std::string_view hypothesis, std::string_view reference) {
  const auto s = ter_stats(hypothesis, reference);
  if (s.ref_len == 0) throw Error(ErrorKind::InvalidInput, "TER: empty reference");
  return {"TER", static_cast<double>(s.edits) / static_cast<double>(s.ref_len),
          ScoreLevel::Segment};
}

MetricScore corpus_ter(std::span<const std::string> hypotheses,
                       std::span<const std::string> references) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorKind::Alignment, std::to_string(hypotheses.size()) + " hypotheses vs " +
                                          std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw Error(ErrorKind::InvalidInput, "empty segment sequence");
  TerStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto s = ter_stats(hypotheses[i], references[i]);
    if (s.ref_len == 0) {
      throw Error(ErrorKind::InvalidInput,
                  "TER: empty reference at segment " + std::to_string(i + 1));
    }
    total += s;
  }
  return {"TER", static_cast<double>(total.edits) / static_cast<double>(total.ref_len),
          ScoreLevel::Corpus};
}

StatsMetric ter_metric() {
  StatsMetric m;
  m.id = "TER";
  m.orientation = Orientation::LowerIsBetter;
  m.width = 2;
  m.segment_stats = [](std::string_view hyp, std::string_view ref) {
    const auto s = ter_stats(hyp, ref);
    return std::vector<double>{static_cast<double>(s.edits), static_cast<double>(s.ref_len)};
  };
  m.score = [](std::span<const double> v) -> std::optional<double> {
    if (v[1] <= 0.0) return std::nullopt;
    return v[0] / v[1];
  };
  return m;
}

}  // namespace mtmeta
