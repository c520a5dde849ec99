#ifndef BITEXT_INGEST_HPP
#define BITEXT_INGEST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bitext/date.hpp"
#include "bitext/lang.hpp"

namespace bitext::ingest {

struct RawPage {
    std::string url;  // absolute, normalized
    int64_t fetched_at = 0;
    int status = 0;
    std::string body;
    std::optional<Lang> lang_hint;
};

struct Politeness {
    int delay_ms = 1000;     // also the base of the exponential backoff
    int max_retries = 3;     // total attempts per URL
    std::string user_agent = "bitext-crawler/0.1";
};

/// Transport seam so crawls can run against HTTP servers or local mirrors.
class Fetcher {
public:
    struct Result {
        bool ok = false;
        int status = 0;
        std::string body;
        std::string error;
    };
    virtual ~Fetcher() = default;
    virtual Result get(const std::string& url, const std::string& user_agent) = 0;
};

std::unique_ptr<Fetcher> make_http_fetcher();
/// Serves file:// URLs from a root directory (empty root = filesystem root).
std::unique_ptr<Fetcher> make_file_fetcher(std::string root);

/// Allow-list, per-host request spacing, and retry with exponential backoff
/// on transport errors and 5xx. Thread-safe.
class PoliteFetcher {
public:
    PoliteFetcher(std::unique_ptr<Fetcher> transport, Politeness politeness,
                  std::vector<std::string> allow_hosts);

    /// Throws HostNotAllowed and FetchFailed.
    RawPage fetch(const std::string& url, std::optional<Lang> lang_hint = {});

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Per-site extraction rules, loaded from a JSON file.
struct SiteRules {
    std::string host;  // also the allow-list entry
    std::string content_selector;
    std::string title_selector;
    std::string author_selector;   // optional (empty = skip)
    std::string date_selector;     // optional
    std::string switch_selector;   // language switch link
    std::vector<std::string> date_formats;  // tried in order
    std::vector<std::pair<Lang, std::string>> lang_patterns;  // URL substring

    static SiteRules load(const std::string& path);
};

struct Document {
    std::string id;  // stable hash of (url, lang)
    Lang lang = Lang::zh;
    std::string title;
    std::optional<std::string> author;
    std::optional<Date> date;
    std::vector<std::string> paragraphs;
    std::string source_url;
    std::optional<std::string> switch_url;
};

std::string doc_id(const std::string& url, Lang lang);

std::optional<Lang> lang_from_url(const std::string& url, const SiteRules& rules);

/// Supports %Y %m %d %B (month name, pt and zh month tables shipped) plus
/// literal text. Returns nullopt when no format matches.
std::optional<Date> parse_date_any(const std::string& text,
                                   const std::vector<std::string>& formats);

/// Applies the site's selector rules. Throws ExtractionFailed when no
/// content paragraphs match; an unparseable date is stored as absent with a
/// warning appended to *warnings (the BadDate condition).
Document extract_document(const RawPage& page, const SiteRules& rules,
                          std::vector<std::string>* warnings = nullptr);

std::optional<std::string> extract_switch_url(const RawPage& page,
                                              const SiteRules& rules);

// Append-only JSONL document store; loading deduplicates by id, last record
// wins. Malformed lines are reported with their line number and skipped.
size_t store_documents(const std::vector<Document>& docs, const std::string& path);

struct DocFilter {
    std::optional<Lang> lang;
    std::optional<Date> date_min;
    std::optional<Date> date_max;
};

struct LoadResult {
    std::vector<Document> docs;
    std::vector<std::string> warnings;
};

LoadResult load_documents(const std::string& path, const DocFilter& filter = {});

// Raw page store, same conventions.
struct PageLoadResult {
    std::vector<RawPage> pages;
    std::vector<std::string> warnings;
};

size_t store_pages(const std::vector<RawPage>& pages, const std::string& path);
PageLoadResult load_pages(const std::string& path);

}  // namespace bitext::ingest

#endif  // BITEXT_INGEST_HPP
