#ifndef BITEXT_SUBWORD_HPP
#define BITEXT_SUBWORD_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bitext::subword {

/// An ordered list of merge operations learned jointly over both language
/// sides. Merges never cross token boundaries.
struct BpeModel {
    std::vector<std::pair<std::string, std::string>> merges;
    std::string marker = "@@";

    size_t n_merges() const { return merges.size(); }
};

/// Greedy joint BPE learning over the concatenation of both token streams.
/// The most frequent adjacent symbol pair is merged repeatedly; equally
/// frequent pairs are resolved by lexicographic (left, right) order, later
/// pair winning. Stops early when no adjacent pair is left.
/// Throws EmptyCorpus when both corpora contain no tokens.
BpeModel learn_bpe(const std::vector<std::string>& corpus_a,
                   const std::vector<std::string>& corpus_b, size_t n_merges);

/// Splits each token to characters, then applies merges in model order.
/// Non-final units carry the continuation marker.
std::vector<std::string> apply_bpe(const BpeModel& model,
                                   const std::vector<std::string>& tokens);

/// Single-token form of apply_bpe.
std::vector<std::string> segment_token(const BpeModel& model, std::string_view token);

/// Joins marker-suffixed units with their successors. Throws DanglingMarker
/// when the final unit carries the marker.
std::vector<std::string> undo_bpe(const std::vector<std::string>& subtokens,
                                  std::string_view marker = "@@");

/// Distinct-type counts before and (when a model is given) after BPE.
std::pair<size_t, size_t> vocab_report(const std::vector<std::string>& corpus,
                                       const BpeModel* model = nullptr);

// Model file format: header line `#bpe v1 marker=@@`, then one merge per
// line, `left<SPACE>right`, in learned order.
std::string format_bpe(const BpeModel& model);
BpeModel parse_bpe(std::string_view content, const std::string& name = "bpe model");
void save_bpe(const BpeModel& model, const std::string& path);
BpeModel load_bpe(const std::string& path);

}  // namespace bitext::subword

#endif  // BITEXT_SUBWORD_HPP
