#include "mtmeta/metrics.hpp"

namespace mtmeta {

const char* metric_id(NativeMetric m) {
  switch (m) {
    case NativeMetric::Bleu: return "BLEU";
    case NativeMetric::Ter: return "TER";
    case NativeMetric::Chrf: return "chrF";
  }
  return "?";
}

ScoreMatrix score_all_systems(const EvalCorpus& corpus, const ScoringOptions& options) {
  if (options.metrics.empty()) throw Error(ErrorKind::InvalidInput, "no metrics selected");
  const auto& refs = corpus.references();
  const std::size_t n = refs.size();

  std::vector<std::vector<std::string>> ref_tokens;
  ref_tokens.reserve(n);
  for (const auto& r : refs) ref_tokens.push_back(tokenize(r).tokens);

  const bool want_bleu = options.metrics.count(NativeMetric::Bleu) > 0;
  const bool want_ter = options.metrics.count(NativeMetric::Ter) > 0;
  const bool want_chrf = options.metrics.count(NativeMetric::Chrf) > 0;
  if (want_ter) {
    for (std::size_t i = 0; i < n; ++i) {
      if (ref_tokens[i].empty()) {
        throw Error(ErrorKind::InvalidInput,
                    "TER: empty reference at segment " + std::to_string(i + 1));
      }
    }
  }

  ScoreMatrix matrix;
  if (want_ter) matrix.set_orientation("TER", Orientation::LowerIsBetter);
  if (want_bleu) matrix.set_orientation("BLEU", Orientation::HigherIsBetter);
  if (want_chrf) matrix.set_orientation("chrF", Orientation::HigherIsBetter);

  for (const auto& [system, hyps] : corpus.systems()) {
    BleuStats bleu_total(4);
    TerStats ter_total;
    ChrfStats chrf_total(6);
    std::vector<double> seg_bleu, seg_ter, seg_chrf;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> hyp_tokens;
      if (want_bleu || want_ter) hyp_tokens = tokenize(hyps[i]).tokens;
      if (want_bleu) {
        const auto s = bleu_stats(hyp_tokens, ref_tokens[i], 4);
        bleu_total += s;
        if (options.segment_bleu_ter) seg_bleu.push_back(bleu_from_stats(s, BleuSmoothing::ExpFloor));
      }
      if (want_ter) {
        const auto edits = static_cast<std::int64_t>(ter_align_tokens(hyp_tokens, ref_tokens[i]).edits());
        const auto len = static_cast<std::int64_t>(ref_tokens[i].size());
        ter_total += TerStats{edits, len};
        if (options.segment_bleu_ter) {
          seg_ter.push_back(static_cast<double>(edits) / static_cast<double>(len));
        }
      }
      if (want_chrf) {
        const auto s = chrf_stats(hyps[i], refs[i], 6);
        chrf_total += s;
        seg_chrf.push_back(chrf_from_stats(s, 2.0));
      }
    }
    if (want_bleu) {
      matrix.set_system_score("BLEU", system, bleu_from_stats(bleu_total, BleuSmoothing::None));
      if (options.segment_bleu_ter) matrix.set_segment_scores("BLEU", system, std::move(seg_bleu));
    }
    if (want_ter) {
      matrix.set_system_score("TER", system,
                              static_cast<double>(ter_total.edits) /
                                  static_cast<double>(ter_total.ref_len));
      if (options.segment_bleu_ter) matrix.set_segment_scores("TER", system, std::move(seg_ter));
    }
    if (want_chrf) {
      matrix.set_system_score("chrF", system, chrf_from_stats(chrf_total, 2.0));
      matrix.set_segment_scores("chrF", system, std::move(seg_chrf));
    }
  }
  return matrix;
}

}  // namespace mtmeta
