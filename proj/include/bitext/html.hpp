#ifndef BITEXT_HTML_HPP
#define BITEXT_HTML_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bitext::html {

/// Selector subset used by site rules: `tag`, `tag.class`, `tag#id`,
/// `.class`, `#id`, `tag[attr=value]`.
struct Selector {
    std::string tag;
    std::string id;
    std::string cls;
    std::string attr_key;
    std::string attr_value;
};

Selector parse_selector(std::string_view s);

/// Inner HTML of each outermost element matching the selector, in document
/// order. Script and style content never matches.
std::vector<std::string> select_inner(std::string_view html, const Selector& sel);

/// Collapsed inner text of the first matching element.
std::optional<std::string> select_text(std::string_view html, const Selector& sel);

/// href of the first <a> matching the selector (raw attribute value).
std::optional<std::string> first_href(std::string_view html, const Selector& sel);

/// All <a href=...> values in document order.
std::vector<std::string> all_hrefs(std::string_view html);

/// Text content split at block-level element boundaries; tags stripped,
/// entities decoded, whitespace collapsed, empty blocks dropped.
std::vector<std::string> block_paragraphs(std::string_view inner_html);

/// Tag-stripped, entity-decoded, whitespace-collapsed text.
std::string inner_text(std::string_view html);

std::string decode_entities(std::string_view s);

}  // namespace bitext::html

#endif  // BITEXT_HTML_HPP
