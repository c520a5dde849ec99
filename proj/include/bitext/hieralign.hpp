#ifndef BITEXT_HIERALIGN_HPP
#define BITEXT_HIERALIGN_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bitext/metrics.hpp"
#include "bitext/textnorm.hpp"
#include "bitext/translator.hpp"

namespace bitext::hieralign {

/// Contiguous unit index range [begin, end).
struct Span {
    int begin = 0;
    int end = 0;

    int size() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

struct UnitPair {
    enum class Level { paragraph, sentence };
    enum class Method { count_rule, bleu_anchor, bleu_merge, length_fill };

    Level level = Level::sentence;
    Span src_span, tgt_span;
    double score = 0.0;
    Method method = Method::count_rule;
};

const char* to_string(UnitPair::Method m);

struct BleuMatrix {
    size_t rows = 0, cols = 0;
    std::vector<double> scores;  // row-major

    double at(size_t i, size_t j) const { return scores[i * cols + j]; }
    double& at(size_t i, size_t j) { return scores[i * cols + j]; }
};

/// Ratio of target to source unit length, estimated from anchor pairs.
struct LengthStats {
    double mean = 1.0;
    double var = 0.25;
    int n = 0;
};

struct HierConfig {
    double theta = 0.1;      // anchor threshold on smoothed sentence BLEU
    double theta_gap = 0.05; // acceptance threshold for gap merge groups
    int max_gap = 8;         // larger gaps skip the BLEU DP
    bool count_rule_filter = false;  // drop 1-1 count pairs with BLEU < filter_min
    double count_rule_filter_min = 0.01;
    metrics::BleuConfig bleu{4, true, metrics::BleuConfig::Smoothing::add_one_on_zero};
    std::optional<LengthStats> fallback_length_stats;  // used with < 3 anchors
};

/// One unit (paragraph or sentence) as a token sequence.
using Units = std::vector<std::vector<std::string>>;

/// Entry (i,j) = sentence_bleu(translate(src_i), tgt_j); each source unit is
/// translated once. Backend errors propagate.
BleuMatrix compute_bleu_matrix(const Units& src_units, const Units& tgt_units,
                               const translator::Translator& t,
                               const metrics::BleuConfig& bleu = {
                                   4, true,
                                   metrics::BleuConfig::Smoothing::add_one_on_zero});

/// Reliable 1-1 links: entries >= theta that are strict row and column
/// maxima, reduced to the longest strictly monotone subsequence (ties by
/// higher total score).
std::vector<std::pair<int, int>> find_anchors(const BleuMatrix& m, double theta);

/// A group of a monotone 1-1/1-2/2-1 segmentation.
struct MergeGroup {
    Span src, tgt;
    double score = 0.0;
};

/// Dynamic program over monotone segmentations of an R x C block with steps
/// 1-1, 1-2, 2-1 plus unscored skips; maximizes the summed group score.
/// Exposed so the optimality of the segmentation can be checked directly.
std::pair<std::vector<MergeGroup>, double> bleu_merge_dp(
    int rows, int cols,
    const std::function<double(int si, int sn, int tj, int tn)>& group_score);

/// Gale-Church style length alignment of a block: Gaussian cost on the
/// target/source length ratio with priors 0.89 (1-1), 0.089 (1-2, 2-1) and
/// 0.01 (1-0, 0-1). Returns aligned groups only (insertions/deletions are
/// omitted), with the minimal total cost.
std::pair<std::vector<MergeGroup>, double> length_dp(
    const std::vector<double>& src_lens, const std::vector<double>& tgt_lens,
    const LengthStats& stats);

LengthStats estimate_length_stats(const std::vector<std::pair<int, int>>& anchors,
                                  const Units& src_units, const Units& tgt_units);

/// Fills the blocks between anchors: a BLEU-merge pass (groups accepted at
/// theta_gap) followed by length-based alignment of what remains. The result
/// merges anchors and fill pairs into one monotone list.
std::vector<UnitPair> fill_gaps(const BleuMatrix& m,
                                const std::vector<std::pair<int, int>>& anchors,
                                const Units& src_units, const Units& tgt_units,
                                const Units& src_translated, const HierConfig& cfg,
                                UnitPair::Level level);

/// Equal unit counts: in-order 1-1 pairs (count rule). Unequal: translation
/// based alignment (matrix -> anchors -> gap fill).
std::vector<UnitPair> align_units(const Units& src_units, const Units& tgt_units,
                                  const translator::Translator& t,
                                  const HierConfig& cfg, UnitPair::Level level);

/// Paragraph-level entry point. Throws EmptyDocument on a side with no
/// paragraphs.
std::vector<UnitPair> align_paragraphs(const Units& src_paras, const Units& tgt_paras,
                                       const translator::Translator& t,
                                       const HierConfig& cfg);

struct SentenceAlignment {
    std::vector<std::string> src_sentences;
    std::vector<std::string> tgt_sentences;
    std::vector<UnitPair> pairs;
};

/// Splits both paragraphs into sentences, tokenizes, and aligns. Throws
/// EmptyParagraph when either side yields no sentences.
SentenceAlignment align_sentences(std::string_view src_para, std::string_view tgt_para,
                                  Lang src_lang, Lang tgt_lang,
                                  const translator::Translator& t,
                                  const HierConfig& cfg,
                                  const textnorm::NormTables& tables =
                                      textnorm::NormTables::builtin());

}  // namespace bitext::hieralign

#endif  // BITEXT_HIERALIGN_HPP
