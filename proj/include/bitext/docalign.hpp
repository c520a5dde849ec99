#ifndef BITEXT_DOCALIGN_HPP
#define BITEXT_DOCALIGN_HPP

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bitext/date.hpp"
#include "bitext/lang.hpp"
#include "bitext/translator.hpp"

namespace bitext::docalign {

/// A document as the aligner sees it: id, one token stream, optional date.
struct DocView {
    std::string id;
    std::vector<std::string> tokens;
    std::optional<Date> date;
};

/// Sparse term-weight vector, sorted by term id.
using SparseVec = std::vector<std::pair<int32_t, double>>;

struct TfIdfIndex {
    std::unordered_map<std::string, int32_t> vocab;
    std::vector<std::string> terms;  // id -> term
    std::vector<double> idf;         // ln(n_docs / df); 0 for df == n_docs
    std::vector<SparseVec> doc_vectors;
    std::vector<double> doc_norms;
    std::vector<std::string> doc_ids;

    size_t n_docs() const { return doc_vectors.size(); }
};

/// tf * idf with tf = raw count, idf = ln(n_docs/df). Throws EmptyCollection.
TfIdfIndex build_tfidf_index(const std::vector<DocView>& docs);

/// Standard cosine; 0 when either norm is 0. Result clamped to [0,1]
/// (weights are non-negative).
double cosine_similarity(const SparseVec& u, const SparseVec& v);

class EmbeddingTable {
public:
    /// Text format: first line `<count> <dim>`, then `word v1 ... vdim`.
    /// NaN/inf components and dimension mismatches are rejected.
    static EmbeddingTable load(const std::string& path);
    static EmbeddingTable from_map(
        int dim, std::unordered_map<std::string, std::vector<double>> vectors);

    const std::vector<double>* lookup(const std::string& word) const;
    int dim() const { return dim_; }
    size_t size() const { return vectors_.size(); }

private:
    int dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Cosine between the centroid of in-vocabulary query terms and the centroid
/// of in-vocabulary document terms (distinct terms). 0 when either side has
/// no coverage.
double embedding_similarity(const std::vector<std::string>& query_terms,
                            const std::vector<std::string>& doc_tokens,
                            const EmbeddingTable& emb);

/// Top-k source terms by tf*idf translated into the target language,
/// ordered by descending source weight. With a Lexicon backend untranslatable
/// terms are dropped; with a generic Translator every output token is kept.
std::vector<std::pair<std::string, double>> pseudo_query_weighted(
    const TfIdfIndex& src_index, size_t doc_idx, const translator::Lexicon& lex,
    size_t top_k);
std::vector<std::pair<std::string, double>> pseudo_query_weighted(
    const TfIdfIndex& src_index, size_t doc_idx, const translator::Translator& t,
    size_t top_k);
std::vector<std::string> make_pseudo_query(const TfIdfIndex& src_index,
                                           size_t doc_idx,
                                           const translator::Lexicon& lex,
                                           size_t top_k);
std::vector<std::string> make_pseudo_query(const TfIdfIndex& src_index,
                                           size_t doc_idx,
                                           const translator::Translator& t,
                                           size_t top_k);

struct DocAlignConfig {
    double lambda = 0.5;     // weight of the TF-IDF cosine in the combination
    double threshold = 0.1;  // pairs below are discarded
    int top_n = 50;          // retrieval shortlist size per source document
    size_t query_top_k = 20;
    int date_window_days = 2;  // negative disables the window
};

struct DocPair {
    std::string src_doc_id;
    std::string tgt_doc_id;
    double score = 0.0;
    enum class Method { url_rule, retrieval } method = Method::retrieval;
};

/// Pseudo-query retrieval with greedy one-to-one matching by descending
/// combined score. `emb` may be null: the score is then the TF-IDF cosine
/// alone. Throws EmptyCollection.
std::vector<DocPair> align_documents(const std::vector<DocView>& src_docs,
                                     const std::vector<DocView>& tgt_docs,
                                     const translator::Lexicon& lex,
                                     const EmbeddingTable* emb,
                                     const DocAlignConfig& cfg);

struct UrlPage {
    std::string id;
    std::string url;
    Lang lang = Lang::zh;
    std::optional<std::string> switch_url;
};

/// Pairs pages whose language-switch link resolves to a crawled page of the
/// other language. Deduplicated, one-to-one, score 1.0.
std::vector<DocPair> align_by_url(const std::vector<UrlPage>& pages, Lang src_lang,
                                  Lang tgt_lang);

}  // namespace bitext::docalign

#endif  // BITEXT_DOCALIGN_HPP
