#include "bitext/textnorm.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext::textnorm {

namespace data {
extern const std::string_view width_tsv;
extern const std::string_view punct_tsv;
extern const std::string_view zh_t2s_tsv;
extern const std::string_view suffixes_pt_tsv;
extern const std::string_view suffixes_en_tsv;
extern const std::string_view abbrev_pt_tsv;
extern const std::string_view abbrev_en_tsv;
}  // namespace data

namespace {

std::vector<std::pair<std::string, std::string>> parse_tsv(std::string_view content,
                                                           const std::string& name) {
    std::vector<std::pair<std::string, std::string>> rows;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= content.size()) {
        size_t nl = content.find('\n', pos);
        std::string_view line = content.substr(pos, nl == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : nl - pos);
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        line_no++;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        size_t tab = line.find('\t');
        if (tab == std::string_view::npos) {
            rows.emplace_back(std::string(line), std::string());
        } else {
            rows.emplace_back(std::string(line.substr(0, tab)),
                              std::string(line.substr(tab + 1)));
        }
        if (rows.back().first.empty())
            throw MalformedFile(name + ":" + std::to_string(line_no) +
                                ": empty source field");
    }
    return rows;
}

char32_t single_cp(const std::string& s, const std::string& name) {
    auto [cp, len] = utf8::decode_at(s, 0);
    if (len != s.size())
        throw MalformedFile(name + ": field is not a single codepoint: " + s);
    return cp;
}

void load_cp_map(std::unordered_map<char32_t, char32_t>& out, std::string_view tsv,
                 const std::string& name) {
    for (auto& [src, tgt] : parse_tsv(tsv, name)) {
        if (tgt.empty()) throw MalformedFile(name + ": missing target for " + src);
        out[single_cp(src, name)] = single_cp(tgt, name);
    }
    // A target that is also a source with a different target would make
    // normalization non-idempotent.
    for (auto& [src, tgt] : out) {
        auto it = out.find(tgt);
        if (it != out.end() && it->second != tgt)
            throw MalformedFile(name + ": mapping is not idempotent at " +
                                utf8::encode(src));
    }
}

void load_punct(std::unordered_map<char32_t, std::string>& out, std::string_view tsv,
                const std::string& name) {
    for (auto& [src, tgt] : parse_tsv(tsv, name)) {
        if (tgt.empty()) throw MalformedFile(name + ": missing target for " + src);
        out[single_cp(src, name)] = tgt;
    }
    for (auto& [src, tgt] : out) {
        for (size_t i = 0; i < tgt.size();) {
            auto [cp, len] = utf8::decode_at(tgt, i);
            if (out.count(cp))
                throw MalformedFile(name + ": target contains a mapped source: " + tgt);
            i += len;
        }
    }
}

void load_suffixes(std::vector<std::u32string>& out, std::string_view tsv,
                   const std::string& name) {
    for (auto& [src, tgt] : parse_tsv(tsv, name)) {
        if (!tgt.empty())
            throw MalformedFile(name + ": suffix targets must be empty (strip-only)");
        auto cps = utf8::decode(src);
        out.emplace_back(cps.begin(), cps.end());
    }
}

void load_abbrev(std::unordered_set<std::string>& out, std::string_view tsv,
                 const std::string& name) {
    for (auto& [src, tgt] : parse_tsv(tsv, name)) out.insert(utf8::to_lower(src));
}

NormTables from_blobs(std::string_view width, std::string_view punct,
                      std::string_view zh, std::string_view suf_pt,
                      std::string_view suf_en, std::string_view ab_pt,
                      std::string_view ab_en) {
    NormTables t;
    load_cp_map(t.width, width, "width.tsv");
    load_punct(t.punct, punct, "punct.tsv");
    load_cp_map(t.zh_t2s, zh, "zh_t2s.tsv");
    load_suffixes(t.suffixes_pt, suf_pt, "suffixes_pt.tsv");
    load_suffixes(t.suffixes_en, suf_en, "suffixes_en.tsv");
    load_abbrev(t.abbrev_pt, ab_pt, "abbrev_pt.tsv");
    load_abbrev(t.abbrev_en, ab_en, "abbrev_en.tsv");
    return t;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedFile("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Latin canonical composition (base + combining mark -> precomposed), the
/// repertoire needed for Portuguese. Returns 0 when no composition exists.
char32_t compose_latin(char32_t base, char32_t comb) {
    struct Row {
        char32_t base;
        char32_t grave, acute, circ, tilde, diaer;
    };
    static constexpr Row rows[] = {
        {'A', 0xC0, 0xC1, 0xC2, 0xC3, 0xC4}, {'E', 0xC8, 0xC9, 0xCA, 0, 0xCB},
        {'I', 0xCC, 0xCD, 0xCE, 0, 0xCF},    {'O', 0xD2, 0xD3, 0xD4, 0xD5, 0xD6},
        {'U', 0xD9, 0xDA, 0xDB, 0, 0xDC},    {'N', 0, 0, 0, 0xD1, 0},
        {'Y', 0, 0xDD, 0, 0, 0},             {'a', 0xE0, 0xE1, 0xE2, 0xE3, 0xE4},
        {'e', 0xE8, 0xE9, 0xEA, 0, 0xEB},    {'i', 0xEC, 0xED, 0xEE, 0, 0xEF},
        {'o', 0xF2, 0xF3, 0xF4, 0xF5, 0xF6}, {'u', 0xF9, 0xFA, 0xFB, 0, 0xFC},
        {'n', 0, 0, 0, 0xF1, 0},             {'y', 0, 0xFD, 0, 0, 0xFF},
    };
    if (comb == 0x327) {  // cedilla
        if (base == 'c') return 0xE7;
        if (base == 'C') return 0xC7;
        return 0;
    }
    for (const Row& r : rows) {
        if (r.base != base) continue;
        switch (comb) {
            case 0x300: return r.grave;
            case 0x301: return r.acute;
            case 0x302: return r.circ;
            case 0x303: return r.tilde;
            case 0x308: return r.diaer;
            default: return 0;
        }
    }
    return 0;
}

bool is_combining_mark(char32_t cp) {
    return cp == 0x300 || cp == 0x301 || cp == 0x302 || cp == 0x303 ||
           cp == 0x308 || cp == 0x327;
}

}  // namespace

const NormTables& NormTables::builtin() {
    static const NormTables t = from_blobs(data::width_tsv, data::punct_tsv,
                                           data::zh_t2s_tsv, data::suffixes_pt_tsv,
                                           data::suffixes_en_tsv, data::abbrev_pt_tsv,
                                           data::abbrev_en_tsv);
    return t;
}

NormTables NormTables::load_dir(const std::string& dir) {
    auto p = [&](const char* f) { return slurp(dir + "/" + f); };
    return from_blobs(p("width.tsv"), p("punct.tsv"), p("zh_t2s.tsv"),
                      p("suffixes_pt.tsv"), p("suffixes_en.tsv"),
                      p("abbrev_pt.tsv"), p("abbrev_en.tsv"));
}

std::string normalize(std::string_view text, Lang lang, const NormConfig& cfg,
                      const NormTables& tables) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size();) {
        auto [cp, len] = utf8::decode_at(text, i);
        i += len;
        if (cfg.width_fold) {
            auto it = tables.width.find(cp);
            if (it != tables.width.end()) cp = it->second;
        }
        if (cfg.punct_normalize) {
            auto it = tables.punct.find(cp);
            if (it != tables.punct.end()) {
                for (char32_t t : utf8::decode(it->second)) out.push_back(t);
                continue;
            }
        }
        if (cfg.zh_variant_fold && lang == Lang::zh) {
            auto it = tables.zh_t2s.find(cp);
            if (it != tables.zh_t2s.end()) cp = it->second;
        }
        if (cfg.case_fold && lang != Lang::zh) cp = utf8::to_lower(cp);
        if (cfg.unicode_compose && is_combining_mark(cp) && !out.empty()) {
            if (char32_t c = compose_latin(out.back(), cp)) {
                out.back() = c;
                continue;
            }
        }
        out.push_back(cp);
    }
    return utf8::encode(out);
}

TokenizedText tokenize(std::string_view text, Lang lang) {
    TokenizedText out;
    out.lang = lang;
    auto push = [&](size_t b, size_t e) {
        out.tokens.emplace_back(text.substr(b, e - b));
        out.offsets.push_back({b, e});
    };
    if (lang == Lang::zh) {
        size_t i = 0;
        while (i < text.size()) {
            auto [cp, len] = utf8::decode_at(text, i);
            if (utf8::is_space(cp)) {
                i += len;
            } else if (utf8::is_latin_alnum(cp)) {
                size_t b = i;
                while (i < text.size()) {
                    auto [c2, l2] = utf8::decode_at(text, i);
                    if (!utf8::is_latin_alnum(c2)) break;
                    i += l2;
                }
                push(b, i);
            } else {
                push(i, i + len);  // CJK or punctuation: one codepoint per token
                i += len;
            }
        }
        return out;
    }
    // pt/en: whitespace chunks, then detach edge punctuation.
    size_t i = 0;
    while (i < text.size()) {
        auto [cp, len] = utf8::decode_at(text, i);
        if (utf8::is_space(cp)) {
            i += len;
            continue;
        }
        size_t chunk_b = i;
        while (i < text.size()) {
            auto [c2, l2] = utf8::decode_at(text, i);
            if (utf8::is_space(c2)) break;
            i += l2;
        }
        size_t chunk_e = i;
        // codepoint boundaries within the chunk
        std::vector<size_t> bounds;
        std::vector<char32_t> cps;
        for (size_t p = chunk_b; p < chunk_e;) {
            auto [c2, l2] = utf8::decode_at(text, p);
            bounds.push_back(p);
            cps.push_back(c2);
            p += l2;
        }
        bounds.push_back(chunk_e);
        auto is_word = [](char32_t c) {
            return utf8::is_latin_alnum(c) || utf8::is_cjk(c);
        };
        size_t lo = 0, hi = cps.size();
        while (lo < hi && !is_word(cps[lo])) lo++;
        while (hi > lo && !is_word(cps[hi - 1])) hi--;
        for (size_t k = 0; k < lo; k++) push(bounds[k], bounds[k + 1]);
        if (lo < hi) push(bounds[lo], bounds[hi]);
        for (size_t k = hi; k < cps.size(); k++) push(bounds[k], bounds[k + 1]);
    }
    return out;
}

namespace {

bool is_terminal(char32_t cp, Lang lang) {
    if (lang == Lang::zh)
        return cp == 0x3002 || cp == 0xFF01 || cp == 0xFF1F || cp == 0xFF1B ||
               cp == '!' || cp == '?' || cp == ';';
    return cp == '.' || cp == '!' || cp == '?';
}

bool is_closing(char32_t cp) {
    switch (cp) {
        case '"': case '\'': case ')': case ']': case '}':
        case 0xBB:      // »
        case 0x2019:    // right single quote
        case 0x201D:    // right double quote
        case 0x300D:    // 」
        case 0x300F:    // 』
        case 0xFF09:    // ）
            return true;
        default:
            return false;
    }
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text, Lang lang,
                                         const NormTables& tables) {
    const auto* abbrev = lang == Lang::pt   ? &tables.abbrev_pt
                         : lang == Lang::en ? &tables.abbrev_en
                                            : nullptr;

    // decode once, keeping byte positions
    std::vector<char32_t> cps;
    std::vector<size_t> pos;
    for (size_t i = 0; i < text.size();) {
        auto [cp, len] = utf8::decode_at(text, i);
        cps.push_back(cp);
        pos.push_back(i);
        i += len;
    }
    pos.push_back(text.size());

    std::vector<std::string> sentences;
    auto emit = [&](size_t b_cp, size_t e_cp) {
        while (b_cp < e_cp && utf8::is_space(cps[b_cp])) b_cp++;
        while (e_cp > b_cp && utf8::is_space(cps[e_cp - 1])) e_cp--;
        if (b_cp < e_cp)
            sentences.emplace_back(text.substr(pos[b_cp], pos[e_cp] - pos[b_cp]));
    };

    size_t start = 0;
    size_t k = 0;
    while (k < cps.size()) {
        if (!is_terminal(cps[k], lang)) {
            k++;
            continue;
        }
        // abbreviation / word-internal period guard for pt/en
        if (abbrev && cps[k] == '.') {
            bool internal = k + 1 < cps.size() && !utf8::is_space(cps[k + 1]) &&
                            !is_terminal(cps[k + 1], lang) && !is_closing(cps[k + 1]);
            if (internal) {
                k++;
                continue;
            }
            size_t w = k;
            while (w > start && (utf8::is_latin_alnum(cps[w - 1]) || cps[w - 1] == '.'))
                w--;
            std::string word;
            for (size_t j = w; j <= k; j++) utf8::append(word, utf8::to_lower(cps[j]));
            if (word.size() > 1 && abbrev->count(word)) {
                k++;
                continue;
            }
        }
        while (k < cps.size() && is_terminal(cps[k], lang)) k++;
        while (k < cps.size() && is_closing(cps[k])) k++;
        emit(start, k);
        start = k;
    }
    emit(start, cps.size());
    if (sentences.empty() && !text.empty()) {
        // whitespace-only input yields nothing; anything else yields itself
        bool all_space = true;
        for (char32_t c : cps) all_space = all_space && utf8::is_space(c);
        if (!all_space) sentences.emplace_back(text);
    }
    return sentences;
}

std::string stem(std::string_view token, Lang lang, const NormTables& tables) {
    if (lang == Lang::zh) return std::string(token);
    const auto& suffixes = lang == Lang::pt ? tables.suffixes_pt : tables.suffixes_en;
    auto cps = utf8::decode(token);
    std::u32string lower;
    for (char32_t c : cps) lower += utf8::to_lower(c);
    for (const auto& suf : suffixes) {
        if (lower.size() < suf.size() + 2) continue;  // minimum stem length 2
        if (lower.compare(lower.size() - suf.size(), suf.size(), suf) != 0) continue;
        std::string out;
        for (size_t i = 0; i + suf.size() < cps.size(); i++) utf8::append(out, cps[i]);
        return out;
    }
    return std::string(token);
}

}  // namespace bitext::textnorm
