#ifndef BITEXT_LANG_HPP
#define BITEXT_LANG_HPP

#include <optional>
#include <string>
#include <string_view>

#include "bitext/errors.hpp"

namespace bitext {

/// The three languages the toolkit handles: Chinese and Portuguese as the
/// working pair, English as the pivot.
enum class Lang { zh, pt, en };

inline std::optional<Lang> try_parse_lang(std::string_view code) {
    if (code == "zh") return Lang::zh;
    if (code == "pt") return Lang::pt;
    if (code == "en") return Lang::en;
    return std::nullopt;
}

inline Lang parse_lang(std::string_view code) {
    if (auto l = try_parse_lang(code)) return *l;
    throw Error("unknown language code: " + std::string(code));
}

inline const char* to_string(Lang l) {
    switch (l) {
        case Lang::zh: return "zh";
        case Lang::pt: return "pt";
        case Lang::en: return "en";
    }
    return "?";
}

}  // namespace bitext

#endif  // BITEXT_LANG_HPP
