#ifndef BITEXT_METRICS_HPP
#define BITEXT_METRICS_HPP

#include <string>
#include <utility>
#include <vector>

namespace bitext::metrics {

struct BleuConfig {
    int max_n = 4;
    bool case_insensitive = true;
    enum class Smoothing { none, add_one_on_zero };
    /// add_one_on_zero keeps the geometric mean finite on short sentences:
    /// an order with zero matches contributes 1/(2 * hyp n-gram count).
    Smoothing smoothing = Smoothing::none;
};

struct BleuScore {
    double score = 0.0;
    std::vector<double> precisions;  // per order 1..max_n
    double brevity_penalty = 0.0;
    size_t hyp_len = 0;
    size_t ref_len = 0;
};

using Tokens = std::vector<std::string>;

/// Modified n-gram precision with clipping, geometric mean, brevity penalty.
/// Throws EmptyReference.
BleuScore sentence_bleu(const Tokens& hyp, const Tokens& ref,
                        const BleuConfig& cfg = {});

/// Match and total counts are pooled over the corpus before the precision
/// computation; the brevity penalty uses summed lengths.
/// Throws EmptyCorpus and EmptyReference.
BleuScore corpus_bleu(const std::vector<std::pair<Tokens, Tokens>>& pairs,
                      const BleuConfig& cfg = {});

/// Two-sided exact binomial sign test on per-sentence score pairs; ties are
/// dropped. Returns 1.0 when every pair is tied. Throws LengthMismatch.
double sign_test(const std::vector<double>& scores_a,
                 const std::vector<double>& scores_b);

}  // namespace bitext::metrics

#endif  // BITEXT_METRICS_HPP
