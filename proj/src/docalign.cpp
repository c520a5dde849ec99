#include "bitext/docalign.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "bitext/errors.hpp"
#include "bitext/url.hpp"

namespace bitext::docalign {

TfIdfIndex build_tfidf_index(const std::vector<DocView>& docs) {
    if (docs.empty()) throw EmptyCollection("build_tfidf_index: no documents");
    TfIdfIndex ix;
    ix.doc_ids.reserve(docs.size());

    std::vector<std::map<std::string, int64_t>> tf(docs.size());
    std::map<std::string, int64_t> df;  // ordered: stable term ids
    for (size_t d = 0; d < docs.size(); d++) {
        ix.doc_ids.push_back(docs[d].id);
        for (const auto& tok : docs[d].tokens) tf[d][tok]++;
        for (const auto& [term, cnt] : tf[d]) df[term]++;
    }
    ix.terms.reserve(df.size());
    ix.idf.reserve(df.size());
    const double n = static_cast<double>(docs.size());
    for (const auto& [term, d] : df) {
        ix.vocab.emplace(term, static_cast<int32_t>(ix.terms.size()));
        ix.terms.push_back(term);
        ix.idf.push_back(std::log(n / static_cast<double>(d)));
    }
    ix.doc_vectors.resize(docs.size());
    ix.doc_norms.resize(docs.size());
    for (size_t d = 0; d < docs.size(); d++) {
        SparseVec& v = ix.doc_vectors[d];
        v.reserve(tf[d].size());
        double norm2 = 0;
        for (const auto& [term, cnt] : tf[d]) {
            const int32_t id = ix.vocab.at(term);
            const double w = static_cast<double>(cnt) * ix.idf[id];
            v.emplace_back(id, w);
            norm2 += w * w;
        }
        std::sort(v.begin(), v.end());
        ix.doc_norms[d] = std::sqrt(norm2);
    }
    return ix;
}

double cosine_similarity(const SparseVec& u, const SparseVec& v) {
    double dot = 0, nu = 0, nv = 0;
    for (const auto& [id, w] : u) nu += w * w;
    for (const auto& [id, w] : v) nv += w * w;
    if (nu == 0 || nv == 0) return 0.0;
    size_t i = 0, j = 0;
    while (i < u.size() && j < v.size()) {
        if (u[i].first < v[j].first) i++;
        else if (u[i].first > v[j].first) j++;
        else dot += u[i++].second * v[j++].second;
    }
    double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    return c < 0 ? 0.0 : (c > 1.0 ? 1.0 : c);
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedFile("cannot open embeddings " + path);
    std::string header;
    if (!std::getline(in, header))
        throw MalformedFile(path + ": missing `<count> <dim>` header");
    std::istringstream hs(header);
    size_t count = 0;
    int dim = 0;
    if (!(hs >> count >> dim) || dim <= 0)
        throw MalformedFile(path + ": bad `<count> <dim>` header");
    EmbeddingTable t;
    t.dim_ = dim;
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        std::vector<double> vec(dim);
        for (int k = 0; k < dim; k++) {
            if (!(ls >> vec[k]))
                throw MalformedFile(path + ":" + std::to_string(line_no) +
                                    ": expected " + std::to_string(dim) + " components");
            if (!std::isfinite(vec[k]))
                throw MalformedFile(path + ":" + std::to_string(line_no) +
                                    ": non-finite component");
        }
        double extra;
        if (ls >> extra)
            throw MalformedFile(path + ":" + std::to_string(line_no) +
                                ": too many components");
        t.vectors_[word] = std::move(vec);
    }
    if (t.vectors_.size() != count)
        throw MalformedFile(path + ": header declares " + std::to_string(count) +
                            " vectors, found " + std::to_string(t.vectors_.size()));
    return t;
}

EmbeddingTable EmbeddingTable::from_map(
    int dim, std::unordered_map<std::string, std::vector<double>> vectors) {
    EmbeddingTable t;
    t.dim_ = dim;
    for (auto& [w, v] : vectors) {
        if (static_cast<int>(v.size()) != dim)
            throw MalformedFile("embedding dim mismatch for " + w);
        for (double x : v)
            if (!std::isfinite(x)) throw MalformedFile("non-finite component for " + w);
    }
    t.vectors_ = std::move(vectors);
    return t;
}

const std::vector<double>* EmbeddingTable::lookup(const std::string& word) const {
    auto it = vectors_.find(word);
    return it == vectors_.end() ? nullptr : &it->second;
}

namespace {

bool centroid(const std::vector<std::string>& terms, const EmbeddingTable& emb,
              std::vector<double>& out) {
    out.assign(emb.dim(), 0.0);
    std::unordered_set<std::string> seen;
    size_t n = 0;
    for (const auto& t : terms) {
        if (!seen.insert(t).second) continue;
        if (const auto* v = emb.lookup(t)) {
            for (int k = 0; k < emb.dim(); k++) out[k] += (*v)[k];
            n++;
        }
    }
    if (n == 0) return false;
    for (double& x : out) x /= static_cast<double>(n);
    return true;
}

}  // namespace

double embedding_similarity(const std::vector<std::string>& query_terms,
                            const std::vector<std::string>& doc_tokens,
                            const EmbeddingTable& emb) {
    std::vector<double> q, d;
    if (!centroid(query_terms, emb, q) || !centroid(doc_tokens, emb, d)) return 0.0;
    double dot = 0, nq = 0, nd = 0;
    for (int k = 0; k < emb.dim(); k++) {
        dot += q[k] * d[k];
        nq += q[k] * q[k];
        nd += d[k] * d[k];
    }
    if (nq == 0 || nd == 0) return 0.0;
    double c = dot / (std::sqrt(nq) * std::sqrt(nd));
    return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
}

namespace {

/// Terms of one document ranked by (weight desc, term asc); zero weights
/// (idf 0) are useless as query terms and skipped.
std::vector<std::pair<std::string, double>> top_terms(const TfIdfIndex& ix,
                                                      size_t doc_idx, size_t top_k) {
    std::vector<std::pair<std::string, double>> ranked;
    for (const auto& [id, w] : ix.doc_vectors.at(doc_idx))
        if (w > 0) ranked.emplace_back(ix.terms[id], w);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    return ranked;
}

std::vector<std::pair<std::string, double>> dedup_keep_order(
    std::vector<std::pair<std::string, double>> q) {
    std::map<std::string, size_t> pos;
    std::vector<std::pair<std::string, double>> out;
    for (auto& [term, w] : q) {
        auto it = pos.find(term);
        if (it == pos.end()) {
            pos[term] = out.size();
            out.emplace_back(term, w);
        } else {
            out[it->second].second += w;  // collisions sum their weights
        }
    }
    return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> pseudo_query_weighted(
    const TfIdfIndex& src_index, size_t doc_idx, const translator::Lexicon& lex,
    size_t top_k) {
    std::vector<std::pair<std::string, double>> q;
    for (auto& [term, w] : top_terms(src_index, doc_idx, top_k)) {
        if (const auto* cands = lex.lookup(term)) q.emplace_back((*cands)[0], w);
        // untranslatable terms are dropped
    }
    return dedup_keep_order(std::move(q));
}

std::vector<std::pair<std::string, double>> pseudo_query_weighted(
    const TfIdfIndex& src_index, size_t doc_idx, const translator::Translator& t,
    size_t top_k) {
    std::vector<std::pair<std::string, double>> q;
    for (auto& [term, w] : top_terms(src_index, doc_idx, top_k)) {
        for (auto& out_tok : t.translate({term})) q.emplace_back(out_tok, w);
    }
    return dedup_keep_order(std::move(q));
}

std::vector<std::string> make_pseudo_query(const TfIdfIndex& src_index, size_t doc_idx,
                                           const translator::Lexicon& lex,
                                           size_t top_k) {
    std::vector<std::string> terms;
    for (auto& [t, w] : pseudo_query_weighted(src_index, doc_idx, lex, top_k))
        terms.push_back(t);
    return terms;
}

std::vector<std::string> make_pseudo_query(const TfIdfIndex& src_index, size_t doc_idx,
                                           const translator::Translator& t,
                                           size_t top_k) {
    std::vector<std::string> terms;
    for (auto& [term, w] : pseudo_query_weighted(src_index, doc_idx, t, top_k))
        terms.push_back(term);
    return terms;
}

std::vector<DocPair> align_documents(const std::vector<DocView>& src_docs,
                                     const std::vector<DocView>& tgt_docs,
                                     const translator::Lexicon& lex,
                                     const EmbeddingTable* emb,
                                     const DocAlignConfig& cfg) {
    if (src_docs.empty() || tgt_docs.empty())
        throw EmptyCollection("align_documents: empty side");
    const TfIdfIndex src_ix = build_tfidf_index(src_docs);
    const TfIdfIndex tgt_ix = build_tfidf_index(tgt_docs);

    struct Scored {
        double score;
        size_t src, tgt;
    };
    std::vector<Scored> scored;
    for (size_t i = 0; i < src_docs.size(); i++) {
        auto query = pseudo_query_weighted(src_ix, i, lex, cfg.query_top_k);
        SparseVec qv;
        std::vector<std::string> query_terms;
        for (auto& [term, w] : query) {
            query_terms.push_back(term);
            auto it = tgt_ix.vocab.find(term);
            if (it != tgt_ix.vocab.end()) qv.emplace_back(it->second, w);
        }
        std::sort(qv.begin(), qv.end());

        std::vector<std::pair<double, size_t>> shortlist;
        for (size_t j = 0; j < tgt_docs.size(); j++) {
            if (cfg.date_window_days >= 0 && src_docs[i].date && tgt_docs[j].date &&
                days_between(*src_docs[i].date, *tgt_docs[j].date) >
                    cfg.date_window_days)
                continue;
            shortlist.emplace_back(cosine_similarity(qv, tgt_ix.doc_vectors[j]), j);
        }
        std::sort(shortlist.begin(), shortlist.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return tgt_ix.doc_ids[a.second] < tgt_ix.doc_ids[b.second];
        });
        if (shortlist.size() > static_cast<size_t>(cfg.top_n))
            shortlist.resize(cfg.top_n);
        for (auto& [cos, j] : shortlist) {
            double combined = cos;
            if (emb) {
                combined = cfg.lambda * cos +
                           (1.0 - cfg.lambda) *
                               embedding_similarity(query_terms, tgt_docs[j].tokens, *emb);
            }
            scored.push_back({combined, i, j});
        }
    }
    std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (src_docs[a.src].id != src_docs[b.src].id)
            return src_docs[a.src].id < src_docs[b.src].id;
        return tgt_docs[a.tgt].id < tgt_docs[b.tgt].id;
    });
    std::vector<char> src_used(src_docs.size(), 0), tgt_used(tgt_docs.size(), 0);
    std::vector<DocPair> pairs;
    for (const Scored& s : scored) {
        if (s.score < cfg.threshold) break;  // sorted: everything below follows
        if (src_used[s.src] || tgt_used[s.tgt]) continue;
        src_used[s.src] = tgt_used[s.tgt] = 1;
        pairs.push_back({src_docs[s.src].id, tgt_docs[s.tgt].id, s.score,
                         DocPair::Method::retrieval});
    }
    std::sort(pairs.begin(), pairs.end(), [](const DocPair& a, const DocPair& b) {
        return a.src_doc_id < b.src_doc_id;
    });
    return pairs;
}

std::vector<DocPair> align_by_url(const std::vector<UrlPage>& pages, Lang src_lang,
                                  Lang tgt_lang) {
    std::vector<size_t> order(pages.size());
    for (size_t i = 0; i < order.size(); i++) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return pages[a].url < pages[b].url;
    });
    std::unordered_map<std::string, size_t> by_url;
    for (size_t i : order) by_url.emplace(url::normalize(pages[i].url), i);

    std::set<std::pair<std::string, std::string>> seen;
    std::unordered_set<std::string> src_used, tgt_used;
    std::vector<DocPair> pairs;
    for (size_t i : order) {
        const UrlPage& p = pages[i];
        if (!p.switch_url) continue;
        auto it = by_url.find(url::normalize(*p.switch_url));
        if (it == by_url.end()) continue;  // dangling link: no pair
        const UrlPage& q = pages[it->second];
        const UrlPage* s = nullptr;
        const UrlPage* t = nullptr;
        if (p.lang == src_lang && q.lang == tgt_lang) {
            s = &p;
            t = &q;
        } else if (p.lang == tgt_lang && q.lang == src_lang) {
            s = &q;
            t = &p;
        } else {
            continue;
        }
        if (!seen.insert({s->id, t->id}).second) continue;  // symmetric duplicate
        if (src_used.count(s->id) || tgt_used.count(t->id)) continue;
        src_used.insert(s->id);
        tgt_used.insert(t->id);
        pairs.push_back({s->id, t->id, 1.0, DocPair::Method::url_rule});
    }
    std::sort(pairs.begin(), pairs.end(), [](const DocPair& a, const DocPair& b) {
        return a.src_doc_id < b.src_doc_id;
    });
    return pairs;
}

}  // namespace bitext::docalign
