#include "bitext/subword.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext::subword {

namespace {

using SymPair = std::pair<std::string, std::string>;

struct PairHash {
    size_t operator()(const SymPair& p) const {
        return utf8::fnv1a(p.second, utf8::fnv1a(p.first) ^ 0x9E3779B97F4A7C15ull);
    }
};

std::vector<std::string> split_chars(std::string_view word) {
    std::vector<std::string> syms;
    for (size_t i = 0; i < word.size();) {
        auto [cp, len] = utf8::decode_at(word, i);
        (void)cp;
        syms.emplace_back(word.substr(i, len));
        i += len;
    }
    return syms;
}

/// One left-to-right pass replacing adjacent (left, right) with their
/// concatenation; a freshly merged symbol may pair with the next one.
bool merge_in_place(std::vector<std::string>& syms, const SymPair& m) {
    bool changed = false;
    size_t w = 0;
    for (size_t r = 0; r < syms.size();) {
        if (r + 1 < syms.size() && syms[r] == m.first && syms[r + 1] == m.second) {
            syms[w++] = syms[r] + syms[r + 1];
            r += 2;
            changed = true;
        } else {
            syms[w++] = std::move(syms[r++]);
        }
    }
    syms.resize(w);
    return changed;
}

}  // namespace

BpeModel learn_bpe(const std::vector<std::string>& corpus_a,
                   const std::vector<std::string>& corpus_b, size_t n_merges) {
    std::unordered_map<std::string, int64_t> word_freq;
    for (const auto& t : corpus_a) word_freq[t]++;
    for (const auto& t : corpus_b) word_freq[t]++;
    if (word_freq.empty()) throw EmptyCorpus("learn_bpe: both corpora are empty");

    std::vector<std::vector<std::string>> words;
    std::vector<int64_t> freqs;
    words.reserve(word_freq.size());
    for (auto& [w, f] : word_freq) {
        words.push_back(split_chars(w));
        freqs.push_back(f);
    }

    std::unordered_map<SymPair, int64_t, PairHash> counts;
    std::unordered_map<SymPair, std::unordered_set<size_t>, PairHash> where;
    auto add_word = [&](size_t wi, int64_t sign) {
        const auto& syms = words[wi];
        for (size_t k = 0; k + 1 < syms.size(); k++) {
            SymPair p{syms[k], syms[k + 1]};
            counts[p] += sign * freqs[wi];
            if (sign > 0)
                where[p].insert(wi);
        }
    };
    for (size_t wi = 0; wi < words.size(); wi++) add_word(wi, +1);

    BpeModel model;
    model.merges.reserve(n_merges);
    for (size_t step = 0; step < n_merges; step++) {
        const SymPair* best = nullptr;
        int64_t best_count = 0;
        for (const auto& [p, c] : counts) {
            if (c <= 0) continue;
            if (c > best_count || (c == best_count && (!best || p > *best))) {
                best = &p;
                best_count = c;
            }
        }
        if (!best) break;  // no adjacent pair left anywhere
        SymPair m = *best;
        model.merges.push_back(m);

        auto affected = std::move(where[m]);
        where.erase(m);
        counts.erase(m);
        for (size_t wi : affected) {
            add_word(wi, -1);
            merge_in_place(words[wi], m);
            add_word(wi, +1);
        }
        // counts for the merged pair were re-added by add_word(+1) on words
        // that no longer contain it only if still adjacent; drop leftovers
        counts.erase(m);
        where.erase(m);
        std::erase_if(counts, [](const auto& kv) { return kv.second <= 0; });
    }
    return model;
}

std::vector<std::string> segment_token(const BpeModel& model, std::string_view token) {
    std::vector<std::string> syms = split_chars(token);
    std::string joined(token);
    for (const auto& m : model.merges) {
        if (syms.size() < 2) break;
        // a merge can only apply if left+right occurs contiguously in the token
        if (joined.find(m.first + m.second) == std::string::npos) continue;
        merge_in_place(syms, m);
    }
    for (size_t i = 0; i + 1 < syms.size(); i++) syms[i] += model.marker;
    return syms;
}

std::vector<std::string> apply_bpe(const BpeModel& model,
                                   const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    std::unordered_map<std::string, std::vector<std::string>> cache;
    for (const auto& t : tokens) {
        auto it = cache.find(t);
        if (it == cache.end())
            it = cache.emplace(t, segment_token(model, t)).first;
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
}

std::vector<std::string> undo_bpe(const std::vector<std::string>& subtokens,
                                  std::string_view marker) {
    std::vector<std::string> out;
    std::string pending;
    bool open = false;
    for (const auto& u : subtokens) {
        if (u.size() >= marker.size() &&
            std::string_view(u).substr(u.size() - marker.size()) == marker) {
            pending += u.substr(0, u.size() - marker.size());
            open = true;
        } else {
            out.push_back(pending + u);
            pending.clear();
            open = false;
        }
    }
    if (open) throw DanglingMarker();
    return out;
}

std::pair<size_t, size_t> vocab_report(const std::vector<std::string>& corpus,
                                       const BpeModel* model) {
    std::unordered_set<std::string> before(corpus.begin(), corpus.end());
    if (!model) return {before.size(), before.size()};
    std::unordered_set<std::string> after;
    for (const auto& t : before) {
        for (auto& u : segment_token(*model, t)) after.insert(std::move(u));
    }
    return {before.size(), after.size()};
}

std::string format_bpe(const BpeModel& model) {
    std::string out = "#bpe v1 marker=" + model.marker + "\n";
    for (const auto& [l, r] : model.merges) {
        out += l;
        out += ' ';
        out += r;
        out += '\n';
    }
    return out;
}

BpeModel parse_bpe(std::string_view content, const std::string& name) {
    BpeModel model;
    size_t pos = 0;
    size_t line_no = 0;
    bool header_seen = false;
    std::unordered_set<std::string> seen;
    while (pos < content.size()) {
        size_t nl = content.find('\n', pos);
        std::string_view line =
            content.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                             : nl - pos);
        pos = nl == std::string_view::npos ? content.size() : nl + 1;
        line_no++;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!header_seen) {
            constexpr std::string_view prefix = "#bpe v1 marker=";
            if (line.substr(0, prefix.size()) != prefix)
                throw MalformedFile(name + ":1: missing `#bpe v1 marker=` header");
            model.marker = std::string(line.substr(prefix.size()));
            if (model.marker.empty())
                throw MalformedFile(name + ":1: empty continuation marker");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        size_t sp = line.find(' ');
        if (sp == std::string_view::npos || sp == 0 || sp + 1 == line.size())
            throw MalformedFile(name + ":" + std::to_string(line_no) +
                                ": expected `left right`");
        std::string l(line.substr(0, sp)), r(line.substr(sp + 1));
        if (!seen.insert(l + "\x1E" + r).second)
            throw MalformedFile(name + ":" + std::to_string(line_no) +
                                ": duplicate merge pair");
        model.merges.emplace_back(std::move(l), std::move(r));
    }
    if (!header_seen) throw MalformedFile(name + ": empty model file");
    return model;
}

void save_bpe(const BpeModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MalformedFile("cannot write " + path);
    out << format_bpe(model);
}

BpeModel load_bpe(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedFile("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_bpe(ss.str(), path);
}

}  // namespace bitext::subword
