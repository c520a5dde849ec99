#include "bitext/html.hpp"

#include <algorithm>
#include <cctype>

#include "bitext/utf8.hpp"

namespace bitext::html {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return std::tolower(c);
    });
    return out;
}

struct Attr {
    std::string key;
    std::string value;
};

struct Tag {
    std::string name;       // lowercased
    bool closing = false;
    bool self_closing = false;
    std::vector<Attr> attrs;
    size_t begin = 0;  // byte offsets of the full tag text
    size_t end = 0;
};

bool is_void_element(const std::string& name) {
    static const char* kVoid[] = {"area", "base", "br",    "col",  "embed",
                                  "hr",   "img",  "input", "link", "meta",
                                  "param", "source", "track", "wbr"};
    for (const char* v : kVoid)
        if (name == v) return true;
    return false;
}

bool is_block_element(const std::string& name) {
    static const char* kBlock[] = {
        "p",       "div",     "br",     "li",    "ul",     "ol",     "h1",
        "h2",      "h3",      "h4",     "h5",    "h6",     "table",  "tr",
        "td",      "th",      "thead",  "tbody", "blockquote", "pre", "section",
        "article", "header",  "footer", "figure", "figcaption", "dd", "dt", "dl"};
    for (const char* v : kBlock)
        if (name == v) return true;
    return false;
}

/// Parses the tag starting at `<` (s[i] == '<'). Returns nullopt for
/// comments/doctype/processing instructions after skipping them via *next.
std::optional<Tag> parse_tag(std::string_view s, size_t i, size_t* next) {
    if (s.compare(i, 4, "<!--") == 0) {
        size_t e = s.find("-->", i + 4);
        *next = e == std::string_view::npos ? s.size() : e + 3;
        return std::nullopt;
    }
    if (i + 1 < s.size() && (s[i + 1] == '!' || s[i + 1] == '?')) {
        size_t e = s.find('>', i);
        *next = e == std::string_view::npos ? s.size() : e + 1;
        return std::nullopt;
    }
    Tag tag;
    tag.begin = i;
    size_t p = i + 1;
    if (p < s.size() && s[p] == '/') {
        tag.closing = true;
        p++;
    }
    size_t name_b = p;
    while (p < s.size() && (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '-'))
        p++;
    if (p == name_b) {  // stray '<'
        *next = i + 1;
        return std::nullopt;
    }
    tag.name = lower(s.substr(name_b, p - name_b));
    while (p < s.size() && s[p] != '>') {
        while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) p++;
        if (p >= s.size() || s[p] == '>') break;
        if (s[p] == '/') {
            tag.self_closing = true;
            p++;
            continue;
        }
        size_t kb = p;
        while (p < s.size() && s[p] != '=' && s[p] != '>' && s[p] != '/' &&
               !std::isspace(static_cast<unsigned char>(s[p])))
            p++;
        Attr a;
        a.key = lower(s.substr(kb, p - kb));
        if (p < s.size() && s[p] == '=') {
            p++;
            if (p < s.size() && (s[p] == '"' || s[p] == '\'')) {
                char q = s[p++];
                size_t vb = p;
                while (p < s.size() && s[p] != q) p++;
                a.value = std::string(s.substr(vb, p - vb));
                if (p < s.size()) p++;
            } else {
                size_t vb = p;
                while (p < s.size() && s[p] != '>' &&
                       !std::isspace(static_cast<unsigned char>(s[p])))
                    p++;
                a.value = std::string(s.substr(vb, p - vb));
            }
        }
        if (!a.key.empty()) tag.attrs.push_back(std::move(a));
    }
    tag.end = p < s.size() ? p + 1 : s.size();
    *next = tag.end;
    return tag;
}

const Attr* find_attr(const Tag& t, std::string_view key) {
    for (const auto& a : t.attrs)
        if (a.key == key) return &a;
    return nullptr;
}

bool matches(const Tag& t, const Selector& sel) {
    if (!sel.tag.empty() && t.name != sel.tag) return false;
    if (!sel.id.empty()) {
        const Attr* a = find_attr(t, "id");
        if (!a || a->value != sel.id) return false;
    }
    if (!sel.cls.empty()) {
        const Attr* a = find_attr(t, "class");
        if (!a) return false;
        // class attribute is a space-separated token list
        std::string_view v = a->value;
        bool found = false;
        size_t b = 0;
        while (b < v.size()) {
            while (b < v.size() && v[b] == ' ') b++;
            size_t e = b;
            while (e < v.size() && v[e] != ' ') e++;
            if (v.substr(b, e - b) == sel.cls) {
                found = true;
                break;
            }
            b = e;
        }
        if (!found) return false;
    }
    if (!sel.attr_key.empty()) {
        const Attr* a = find_attr(t, sel.attr_key);
        if (!a || a->value != sel.attr_value) return false;
    }
    return true;
}

/// Skips raw-content elements; returns the position after `</name>`.
size_t skip_raw(std::string_view s, size_t from, const std::string& name) {
    std::string close = "</" + name;
    size_t p = from;
    while (p < s.size()) {
        size_t e = s.find(close, p);
        if (e == std::string_view::npos) return s.size();
        size_t gt = s.find('>', e);
        return gt == std::string_view::npos ? s.size() : gt + 1;
    }
    return s.size();
}

/// Calls fn(tag, content_begin) for every open tag; fn returns the position
/// to continue scanning from (or 0 to continue normally).
template <typename Fn>
void scan(std::string_view s, Fn&& fn) {
    size_t i = 0;
    while (i < s.size()) {
        size_t lt = s.find('<', i);
        if (lt == std::string_view::npos) break;
        size_t next = lt + 1;
        auto tag = parse_tag(s, lt, &next);
        if (tag && !tag->closing && (tag->name == "script" || tag->name == "style"))
            next = skip_raw(s, next, tag->name);
        if (tag) {
            size_t jump = fn(*tag, next);
            if (jump > next) next = jump;
        }
        i = next;
    }
}

}  // namespace

Selector parse_selector(std::string_view s) {
    Selector sel;
    size_t br = s.find('[');
    if (br != std::string_view::npos) {
        size_t eq = s.find('=', br);
        size_t close = s.find(']', br);
        if (eq != std::string_view::npos && close != std::string_view::npos && eq < close) {
            sel.attr_key = lower(s.substr(br + 1, eq - br - 1));
            sel.attr_value = std::string(s.substr(eq + 1, close - eq - 1));
        }
        s = s.substr(0, br);
    }
    size_t hash = s.find('#');
    size_t dot = s.find('.');
    size_t cut = std::min(hash, dot);
    sel.tag = lower(s.substr(0, cut == std::string_view::npos ? s.size() : cut));
    if (hash != std::string_view::npos)
        sel.id = std::string(s.substr(hash + 1, dot != std::string_view::npos && dot > hash
                                                    ? dot - hash - 1
                                                    : std::string_view::npos));
    if (dot != std::string_view::npos)
        sel.cls = std::string(s.substr(dot + 1, hash != std::string_view::npos && hash > dot
                                                    ? hash - dot - 1
                                                    : std::string_view::npos));
    return sel;
}

/// Finds the end of the element opened by `tag` whose content starts at
/// `from`, honoring nesting of the same tag name.
static size_t element_end(std::string_view s, const std::string& name, size_t from,
                          size_t* content_end) {
    int depth = 1;
    size_t i = from;
    while (i < s.size()) {
        size_t lt = s.find('<', i);
        if (lt == std::string_view::npos) break;
        size_t next = lt + 1;
        auto tag = parse_tag(s, lt, &next);
        if (tag && !tag->closing && (tag->name == "script" || tag->name == "style"))
            next = skip_raw(s, next, tag->name);
        if (tag && tag->name == name && !is_void_element(name)) {
            if (tag->closing) {
                if (--depth == 0) {
                    *content_end = lt;
                    return next;
                }
            } else if (!tag->self_closing) {
                depth++;
            }
        }
        i = next;
    }
    *content_end = s.size();
    return s.size();
}

std::vector<std::string> select_inner(std::string_view html, const Selector& sel) {
    std::vector<std::string> out;
    scan(html, [&](const Tag& tag, size_t content_begin) -> size_t {
        if (tag.closing || !matches(tag, sel)) return 0;
        if (tag.self_closing || is_void_element(tag.name)) {
            out.emplace_back();
            return 0;
        }
        size_t content_end = 0;
        size_t after = element_end(html, tag.name, content_begin, &content_end);
        out.emplace_back(html.substr(content_begin, content_end - content_begin));
        return after;  // outermost matches only
    });
    return out;
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        size_t semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        std::string_view ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (ent == "nbsp") out += ' ';
        else if (!ent.empty() && ent[0] == '#') {
            char32_t cp = 0;
            bool ok = ent.size() > 1;
            if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
                for (size_t k = 2; k < ent.size() && ok; k++) {
                    char c = ent[k];
                    int d = c >= '0' && c <= '9'   ? c - '0'
                            : c >= 'a' && c <= 'f' ? c - 'a' + 10
                            : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                                   : -1;
                    if (d < 0) ok = false;
                    else cp = cp * 16 + d;
                }
            } else {
                for (size_t k = 1; k < ent.size() && ok; k++) {
                    if (ent[k] < '0' || ent[k] > '9') ok = false;
                    else cp = cp * 10 + (ent[k] - '0');
                }
            }
            if (!ok || cp == 0 || cp > 0x10FFFF) {
                out += s[i++];
                continue;
            }
            utf8::append(out, cp);
        } else {
            out += s[i++];
            continue;
        }
        i = semi + 1;
    }
    return out;
}

namespace {

std::string collapse_ws(std::string_view s) {
    std::string out;
    bool pending = false;
    for (size_t i = 0; i < s.size();) {
        auto [cp, len] = utf8::decode_at(s, i);
        i += len;
        if (utf8::is_space(cp)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        utf8::append(out, cp);
    }
    return out;
}

}  // namespace

std::vector<std::string> block_paragraphs(std::string_view inner_html) {
    std::vector<std::string> blocks;
    std::string cur;
    size_t text_from = 0;
    auto flush = [&]() {
        std::string text = collapse_ws(decode_entities(cur));
        if (!text.empty()) blocks.push_back(std::move(text));
        cur.clear();
    };
    size_t i = 0;
    while (i < inner_html.size()) {
        size_t lt = inner_html.find('<', i);
        if (lt == std::string_view::npos) {
            cur += inner_html.substr(i);
            break;
        }
        cur += inner_html.substr(i, lt - i);
        size_t next = lt + 1;
        auto tag = parse_tag(inner_html, lt, &next);
        if (tag) {
            if (!tag->closing && (tag->name == "script" || tag->name == "style"))
                next = skip_raw(inner_html, next, tag->name);
            if (is_block_element(tag->name)) flush();
        }
        i = next;
        (void)text_from;
    }
    flush();
    return blocks;
}

std::string inner_text(std::string_view html) {
    auto blocks = block_paragraphs(html);
    std::string out;
    for (size_t i = 0; i < blocks.size(); i++) {
        if (i) out += ' ';
        out += blocks[i];
    }
    return out;
}

std::optional<std::string> select_text(std::string_view html, const Selector& sel) {
    auto inner = select_inner(html, sel);
    if (inner.empty()) return std::nullopt;
    return inner_text(inner[0]);
}

std::optional<std::string> first_href(std::string_view html, const Selector& sel) {
    std::optional<std::string> href;
    scan(html, [&](const Tag& tag, size_t) -> size_t {
        if (href || tag.closing || tag.name != "a" || !matches(tag, sel)) return 0;
        if (const Attr* a = find_attr(tag, "href")) href = decode_entities(a->value);
        return 0;
    });
    return href;
}

std::vector<std::string> all_hrefs(std::string_view html) {
    std::vector<std::string> hrefs;
    scan(html, [&](const Tag& tag, size_t) -> size_t {
        if (tag.closing || tag.name != "a") return 0;
        if (const Attr* a = find_attr(tag, "href"))
            hrefs.push_back(decode_entities(a->value));
        return 0;
    });
    return hrefs;
}

}  // namespace bitext::html
