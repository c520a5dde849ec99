#ifndef BITEXT_URL_HPP
#define BITEXT_URL_HPP

#include <optional>
#include <string>
#include <string_view>

namespace bitext::url {

struct Url {
    std::string scheme;
    std::string host;
    std::string port;  // empty when absent
    std::string path;
    std::string query;  // without '?'
};

std::optional<Url> parse(std::string_view url);
std::string to_string(const Url& u);

/// Lowercases scheme/host, strips default ports and trailing slashes, drops
/// the fragment. Idempotent. Unparseable input is returned unchanged.
std::string normalize(std::string_view url);

/// RFC 3986 reference resolution (absolute/relative hrefs, dot segments).
std::string resolve(std::string_view base, std::string_view ref);

}  // namespace bitext::url

#endif  // BITEXT_URL_HPP
