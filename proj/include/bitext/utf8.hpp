#ifndef BITEXT_UTF8_HPP
#define BITEXT_UTF8_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bitext::utf8 {

/// Decodes the codepoint starting at byte i. Malformed bytes are passed
/// through one at a time as their Latin-1 value so that re-encoding the
/// stream reproduces the input exactly.
inline std::pair<char32_t, size_t> decode_at(std::string_view s, size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};
    auto cont = [&](size_t k) {
        return i + k < s.size() &&
               (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    auto cb = [&](size_t k) {
        return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F);
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1))
        return {(char32_t(b0 & 0x1F) << 6) | cb(1), 2};
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2))
        return {(char32_t(b0 & 0x0F) << 12) | (cb(1) << 6) | cb(2), 3};
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
        return {(char32_t(b0 & 0x07) << 18) | (cb(1) << 12) | (cb(2) << 6) | cb(3), 4};
    return {b0, 1};  // malformed: single byte
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline std::string encode(char32_t cp) {
    std::string s;
    append(s, cp);
    return s;
}

inline std::vector<char32_t> decode(std::string_view s) {
    std::vector<char32_t> cps;
    cps.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        auto [cp, len] = decode_at(s, i);
        cps.push_back(cp);
        i += len;
    }
    return cps;
}

inline std::string encode(const std::vector<char32_t>& cps) {
    std::string s;
    for (char32_t cp : cps) append(s, cp);
    return s;
}

inline size_t count(std::string_view s) {
    size_t n = 0;
    for (size_t i = 0; i < s.size(); n++) i += decode_at(s, i).second;
    return n;
}

inline bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) ||   // unified ideographs
           (cp >= 0x3400 && cp <= 0x4DBF) ||   // extension A
           (cp >= 0xF900 && cp <= 0xFAFF) ||   // compatibility
           (cp >= 0x20000 && cp <= 0x2A6DF);   // extension B
}

inline bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
           cp == '\v' || cp == 0xA0 || cp == 0x3000;
}

inline bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

/// Latin letters (ASCII, Latin-1 supplement, Latin Extended-A/B).
inline bool is_latin_letter(char32_t cp) {
    if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z')) return true;
    if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
    return false;
}

inline bool is_latin_alnum(char32_t cp) {
    return is_latin_letter(cp) || is_ascii_digit(cp);
}

/// Simple lowercase mapping covering ASCII, Latin-1 and Latin Extended-A.
/// Enough for Portuguese and English; CJK is untouched.
inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp == 0x178) return 0xFF;  // Y with diaeresis
    if (cp >= 0x100 && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
}

inline std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        auto [cp, len] = decode_at(s, i);
        append(out, to_lower(cp));
        i += len;
    }
    return out;
}

/// FNV-1a, used for stable document ids and cache keys.
inline uint64_t fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace bitext::utf8

#endif  // BITEXT_UTF8_HPP
