#ifndef BITEXT_TEXTNORM_HPP
#define BITEXT_TEXTNORM_HPP

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bitext/lang.hpp"

namespace bitext::textnorm {

/// Which normalization passes run. Normalization under a fixed config is
/// idempotent. `stemming` is not consumed by normalize(); retrieval decides
/// whether to stem (see docalign).
struct NormConfig {
    bool width_fold = true;       // full-width ASCII range -> half-width
    bool unicode_compose = true;  // base + combining mark -> precomposed
    bool zh_variant_fold = true;  // traditional -> simplified (zh only)
    bool punct_normalize = true;  // quote/dash/ellipsis variants -> canonical
    bool case_fold = true;        // lowercase (pt/en only)
    bool stemming = true;
};

/// Mapping tables. The defaults are compiled in from data/textnorm/; edited
/// copies can be loaded from a directory holding the same seven TSV files
/// (one `source<TAB>target` pair per line, `#` comments allowed).
struct NormTables {
    std::unordered_map<char32_t, char32_t> width;
    std::unordered_map<char32_t, std::string> punct;
    std::unordered_map<char32_t, char32_t> zh_t2s;
    std::vector<std::u32string> suffixes_pt;  // ordered, first match wins
    std::vector<std::u32string> suffixes_en;
    std::unordered_set<std::string> abbrev_pt;  // lowercased, incl. final '.'
    std::unordered_set<std::string> abbrev_en;

    static const NormTables& builtin();
    static NormTables load_dir(const std::string& dir);
};

/// Byte offsets into the normalized text, [begin, end).
struct TokenSpan {
    size_t begin = 0;
    size_t end = 0;
};

struct TokenizedText {
    std::vector<std::string> tokens;
    Lang lang = Lang::en;
    std::vector<TokenSpan> offsets;
};

std::string normalize(std::string_view text, Lang lang, const NormConfig& cfg,
                      const NormTables& tables = NormTables::builtin());

/// zh: one token per CJK codepoint, contiguous Latin/digit runs kept whole.
/// pt/en: whitespace split with leading/trailing punctuation detached.
TokenizedText tokenize(std::string_view text, Lang lang);

std::vector<std::string> split_sentences(std::string_view paragraph, Lang lang,
                                         const NormTables& tables = NormTables::builtin());

/// Suffix-stripping stemmer; the result is always a non-empty prefix of the
/// token (minimum stem length 2). zh tokens pass through.
std::string stem(std::string_view token, Lang lang,
                 const NormTables& tables = NormTables::builtin());

}  // namespace bitext::textnorm

#endif  // BITEXT_TEXTNORM_HPP
