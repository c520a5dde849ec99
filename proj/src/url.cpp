#include "bitext/url.hpp"

#include <algorithm>
#include <vector>

namespace bitext::url {

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return c >= 'A' && c <= 'Z' ? c + 0x20 : c;
    });
    return out;
}

/// RFC 3986 5.2.4 remove_dot_segments.
std::string remove_dot_segments(std::string_view path) {
    std::string in(path), out;
    while (!in.empty()) {
        if (in.rfind("../", 0) == 0) {
            in.erase(0, 3);
        } else if (in.rfind("./", 0) == 0) {
            in.erase(0, 2);
        } else if (in.rfind("/./", 0) == 0) {
            in.erase(0, 2);
        } else if (in == "/.") {
            in = "/";
        } else if (in.rfind("/../", 0) == 0 || in == "/..") {
            in.erase(0, in == "/.." ? 3 : 3);
            if (in.empty()) in = "/";
            size_t slash = out.find_last_of('/');
            out.erase(slash == std::string::npos ? 0 : slash);
        } else if (in == "." || in == "..") {
            in.clear();
        } else {
            size_t start = in[0] == '/' ? 1 : 0;
            size_t next = in.find('/', start);
            out += in.substr(0, next == std::string::npos ? in.size() : next);
            in.erase(0, next == std::string::npos ? in.size() : next);
        }
    }
    return out;
}

std::string merge_paths(const Url& base, std::string_view ref_path) {
    if (!base.host.empty() && base.path.empty()) return "/" + std::string(ref_path);
    size_t slash = base.path.find_last_of('/');
    if (slash == std::string::npos) return std::string(ref_path);
    return base.path.substr(0, slash + 1) + std::string(ref_path);
}

}  // namespace

std::optional<Url> parse(std::string_view s) {
    size_t colon = s.find(':');
    if (colon == std::string_view::npos || colon + 2 >= s.size() ||
        s[colon + 1] != '/' || s[colon + 2] != '/')
        return std::nullopt;
    Url u;
    u.scheme = lower_ascii(s.substr(0, colon));
    if (u.scheme.empty()) return std::nullopt;
    size_t rest = colon + 3;
    size_t frag = s.find('#', rest);
    std::string_view body = s.substr(rest, frag == std::string_view::npos
                                               ? std::string_view::npos
                                               : frag - rest);
    size_t path_start = body.find('/');
    std::string_view authority =
        body.substr(0, path_start == std::string_view::npos ? body.size() : path_start);
    std::string_view path_query =
        path_start == std::string_view::npos ? std::string_view{} : body.substr(path_start);
    size_t port_colon = authority.rfind(':');
    if (port_colon != std::string_view::npos) {
        u.host = lower_ascii(authority.substr(0, port_colon));
        u.port = std::string(authority.substr(port_colon + 1));
    } else {
        u.host = lower_ascii(authority);
    }
    size_t q = path_query.find('?');
    u.path = std::string(path_query.substr(0, q == std::string_view::npos
                                                  ? path_query.size()
                                                  : q));
    if (q != std::string_view::npos) u.query = std::string(path_query.substr(q + 1));
    return u;
}

std::string to_string(const Url& u) {
    std::string s = u.scheme + "://" + u.host;
    if (!u.port.empty()) s += ":" + u.port;
    s += u.path;
    if (!u.query.empty()) s += "?" + u.query;
    return s;
}

std::string normalize(std::string_view url_str) {
    auto u = parse(url_str);
    if (!u) return std::string(url_str);
    if ((u->scheme == "http" && u->port == "80") ||
        (u->scheme == "https" && u->port == "443"))
        u->port.clear();
    u->path = remove_dot_segments(u->path);
    while (u->path.size() > 1 && u->path.back() == '/') u->path.pop_back();
    if (u->path == "/") u->path.clear();
    return to_string(*u);
}

std::string resolve(std::string_view base_str, std::string_view ref) {
    if (ref.empty()) return normalize(base_str);
    if (parse(ref)) return normalize(ref);  // already absolute
    auto base = parse(base_str);
    if (!base) return std::string(ref);
    Url out = *base;
    out.query.clear();
    size_t frag = ref.find('#');
    std::string_view r = ref.substr(0, frag);
    if (r.empty()) return normalize(to_string(out));
    if (r.size() >= 2 && r[0] == '/' && r[1] == '/') {
        // network-path reference
        return normalize(base->scheme + ":" + std::string(r));
    }
    size_t q = r.find('?');
    std::string_view rp = r.substr(0, q);
    if (q != std::string_view::npos) out.query = std::string(r.substr(q + 1));
    if (!rp.empty() && rp[0] == '/') {
        out.path = remove_dot_segments(rp);
    } else if (!rp.empty()) {
        out.path = remove_dot_segments(merge_paths(*base, rp));
    }
    return normalize(to_string(out));
}

}  // namespace bitext::url
