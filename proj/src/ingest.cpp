#include "bitext/ingest.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "bitext/errors.hpp"
#include "bitext/html.hpp"
#include "bitext/url.hpp"
#include "bitext/utf8.hpp"

namespace bitext::ingest {

using nlohmann::json;

namespace {

class HttpFetcher : public Fetcher {
public:
    Result get(const std::string& url_str, const std::string& user_agent) override {
        auto u = url::parse(url_str);
        if (!u) return {false, 0, "", "unparseable url"};
        std::string origin = u->scheme + "://" + u->host;
        if (!u->port.empty()) origin += ":" + u->port;
        httplib::Client client(origin);
        client.set_follow_location(true);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        std::string target = u->path.empty() ? "/" : u->path;
        if (!u->query.empty()) target += "?" + u->query;
        auto res = client.Get(target, {{"User-Agent", user_agent}});
        if (!res) return {false, 0, "", httplib::to_string(res.error())};
        return {true, res->status, res->body, ""};
    }
};

class FileFetcher : public Fetcher {
public:
    explicit FileFetcher(std::string root) : root_(std::move(root)) {}

    Result get(const std::string& url_str, const std::string&) override {
        auto u = url::parse(url_str);
        if (!u || u->scheme != "file") return {false, 0, "", "not a file url"};
        std::string path = root_ + u->path;
        std::ifstream in(path, std::ios::binary);
        if (!in) return {true, 404, "", ""};
        std::string body((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        return {true, 200, std::move(body), ""};
    }

private:
    std::string root_;
};

}  // namespace

std::unique_ptr<Fetcher> make_http_fetcher() { return std::make_unique<HttpFetcher>(); }

std::unique_ptr<Fetcher> make_file_fetcher(std::string root) {
    return std::make_unique<FileFetcher>(std::move(root));
}

struct PoliteFetcher::Impl {
    std::unique_ptr<Fetcher> transport;
    Politeness politeness;
    std::unordered_set<std::string> allow;
    std::mutex mu;
    std::unordered_map<std::string, std::chrono::steady_clock::time_point> last;
};

PoliteFetcher::PoliteFetcher(std::unique_ptr<Fetcher> transport, Politeness politeness,
                             std::vector<std::string> allow_hosts)
    : impl_(std::make_shared<Impl>()) {
    impl_->transport = std::move(transport);
    impl_->politeness = politeness;
    for (auto& h : allow_hosts) impl_->allow.insert(h);
}

RawPage PoliteFetcher::fetch(const std::string& url_str, std::optional<Lang> lang_hint) {
    const std::string normalized = url::normalize(url_str);
    auto u = url::parse(normalized);
    if (!u) throw FetchFailed("unparseable url: " + url_str);
    // file:// mirrors bypass the allow-list; remote hosts must be listed
    if (u->scheme != "file" && !impl_->allow.count(u->host))
        throw HostNotAllowed("host not allow-listed: " + u->host);

    const int attempts = std::max(1, impl_->politeness.max_retries);
    std::string last_error;
    for (int attempt = 0; attempt < attempts; attempt++) {
        // per-host minimum spacing; backoff doubles the base delay each retry
        const auto gap =
            std::chrono::milliseconds(impl_->politeness.delay_ms) * (1 << attempt);
        {
            std::unique_lock lock(impl_->mu);
            for (;;) {
                auto it = impl_->last.find(u->host);
                if (it == impl_->last.end()) break;
                auto wake = it->second + gap;
                auto now = std::chrono::steady_clock::now();
                if (wake <= now) break;
                lock.unlock();
                std::this_thread::sleep_until(wake);
                lock.lock();
            }
            impl_->last[u->host] = std::chrono::steady_clock::now();
        }
        auto res = impl_->transport->get(normalized, impl_->politeness.user_agent);
        if (res.ok && res.status < 500) {
            RawPage page;
            page.url = normalized;
            page.fetched_at = std::chrono::duration_cast<std::chrono::seconds>(
                                  std::chrono::system_clock::now().time_since_epoch())
                                  .count();
            page.status = res.status;
            page.body = std::move(res.body);
            page.lang_hint = lang_hint;
            return page;
        }
        last_error = res.ok ? "status " + std::to_string(res.status) : res.error;
    }
    throw FetchFailed("fetch failed for " + normalized + ": " + last_error);
}

SiteRules SiteRules::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedFile("cannot open site rules " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw MalformedFile(path + ": " + e.what());
    }
    SiteRules r;
    try {
        r.host = j.at("host").get<std::string>();
        r.content_selector = j.at("content_selector").get<std::string>();
        r.title_selector = j.value("title_selector", std::string("title"));
        r.author_selector = j.value("author_selector", std::string());
        r.date_selector = j.value("date_selector", std::string());
        r.switch_selector = j.value("switch_selector", std::string());
        if (j.contains("date_formats"))
            for (const auto& f : j.at("date_formats"))
                r.date_formats.push_back(f.get<std::string>());
        if (j.contains("lang_patterns"))
            for (const auto& [code, pat] : j.at("lang_patterns").items())
                r.lang_patterns.emplace_back(parse_lang(code), pat.get<std::string>());
    } catch (const json::exception& e) {
        throw MalformedFile(path + ": " + e.what());
    }
    return r;
}

std::string doc_id(const std::string& url, Lang lang) {
    uint64_t h = utf8::fnv1a(url);
    h = utf8::fnv1a(std::string_view("\0", 1), h);
    h = utf8::fnv1a(to_string(lang), h);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<Lang> lang_from_url(const std::string& url, const SiteRules& rules) {
    for (const auto& [lang, pat] : rules.lang_patterns)
        if (url.find(pat) != std::string::npos) return lang;
    return std::nullopt;
}

namespace {

const char* kPtMonths[12] = {"janeiro", "fevereiro", "março",    "abril",
                             "maio",    "junho",     "julho",    "agosto",
                             "setembro", "outubro",  "novembro", "dezembro"};

std::optional<int> match_month_name(std::string_view s, size_t* used) {
    std::string low = utf8::to_lower(s.substr(0, std::min<size_t>(s.size(), 12)));
    for (int m = 0; m < 12; m++) {
        std::string_view name = kPtMonths[m];
        if (low.size() >= name.size() && low.compare(0, name.size(), name) == 0) {
            *used = name.size();
            return m + 1;
        }
    }
    return std::nullopt;
}

std::optional<Date> parse_one_format(const std::string& text, const std::string& fmt) {
    Date d;
    bool have_y = false, have_m = false, have_d = false;
    size_t ti = 0;
    for (size_t fi = 0; fi < fmt.size();) {
        if (fmt[fi] == '%' && fi + 1 < fmt.size()) {
            char spec = fmt[fi + 1];
            fi += 2;
            if (spec == 'Y' || spec == 'm' || spec == 'd') {
                size_t digits = 0;
                int value = 0;
                size_t max_digits = spec == 'Y' ? 4 : 2;
                while (ti < text.size() && digits < max_digits &&
                       text[ti] >= '0' && text[ti] <= '9') {
                    value = value * 10 + (text[ti] - '0');
                    ti++;
                    digits++;
                }
                if (digits == 0) return std::nullopt;
                if (spec == 'Y') { d.year = value; have_y = true; }
                if (spec == 'm') { d.month = value; have_m = true; }
                if (spec == 'd') { d.day = value; have_d = true; }
            } else if (spec == 'B') {
                size_t used = 0;
                auto m = match_month_name(std::string_view(text).substr(ti), &used);
                if (!m) return std::nullopt;
                d.month = *m;
                have_m = true;
                ti += used;
            } else if (spec == '%') {
                if (ti >= text.size() || text[ti] != '%') return std::nullopt;
                ti++;
            } else {
                return std::nullopt;  // unsupported specifier
            }
        } else {
            // literal match, byte for byte
            if (ti >= text.size() || text[ti] != fmt[fi]) return std::nullopt;
            ti++;
            fi++;
        }
    }
    while (ti < text.size() &&
           (text[ti] == ' ' || text[ti] == '\t' || text[ti] == '\r')) ti++;
    if (ti != text.size()) return std::nullopt;
    if (!have_y || !have_m || !have_d) return std::nullopt;
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31 || d.year < 1000)
        return std::nullopt;
    return d;
}

}  // namespace

std::optional<Date> parse_date_any(const std::string& text,
                                   const std::vector<std::string>& formats) {
    // trim before matching
    size_t b = text.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::nullopt;
    size_t e = text.find_last_not_of(" \t\r\n");
    std::string trimmed = text.substr(b, e - b + 1);
    for (const auto& f : formats)
        if (auto d = parse_one_format(trimmed, f)) return d;
    return std::nullopt;
}

Document extract_document(const RawPage& page, const SiteRules& rules,
                          std::vector<std::string>* warnings) {
    Document doc;
    doc.source_url = page.url;
    if (auto l = page.lang_hint) doc.lang = *l;
    else if (auto l2 = lang_from_url(page.url, rules)) doc.lang = *l2;
    else throw ExtractionFailed("cannot determine language for " + page.url);
    doc.id = doc_id(page.url, doc.lang);

    auto content = html::select_inner(page.body, html::parse_selector(rules.content_selector));
    for (const auto& block : content) {
        for (auto& p : html::block_paragraphs(block)) doc.paragraphs.push_back(std::move(p));
    }
    if (doc.paragraphs.empty())
        throw ExtractionFailed("no content paragraphs matched for " + page.url);

    if (auto t = html::select_text(page.body, html::parse_selector(rules.title_selector)))
        doc.title = *t;
    if (!rules.author_selector.empty()) {
        if (auto a = html::select_text(page.body, html::parse_selector(rules.author_selector)))
            if (!a->empty()) doc.author = *a;
    }
    if (!rules.date_selector.empty()) {
        if (auto dt = html::select_text(page.body, html::parse_selector(rules.date_selector))) {
            doc.date = parse_date_any(*dt, rules.date_formats);
            if (!doc.date && !dt->empty() && warnings)
                warnings->push_back("bad date for " + page.url + ": " + *dt);
        }
    }
    doc.switch_url = extract_switch_url(page, rules);
    return doc;
}

std::optional<std::string> extract_switch_url(const RawPage& page,
                                              const SiteRules& rules) {
    if (rules.switch_selector.empty()) return std::nullopt;
    auto href = html::first_href(page.body, html::parse_selector(rules.switch_selector));
    if (!href || href->empty()) return std::nullopt;
    return url::resolve(page.url, *href);
}

namespace {

json doc_to_json(const Document& d) {
    json j{{"id", d.id},
           {"lang", to_string(d.lang)},
           {"title", d.title},
           {"paragraphs", d.paragraphs},
           {"source_url", d.source_url}};
    if (d.author) j["author"] = *d.author;
    if (d.date) j["date"] = format_date(*d.date);
    if (d.switch_url) j["switch_url"] = *d.switch_url;
    return j;
}

Document doc_from_json(const json& j) {
    Document d;
    d.id = j.at("id").get<std::string>();
    d.lang = parse_lang(j.at("lang").get<std::string>());
    d.title = j.value("title", std::string());
    for (const auto& p : j.at("paragraphs")) d.paragraphs.push_back(p.get<std::string>());
    d.source_url = j.value("source_url", std::string());
    if (j.contains("author")) d.author = j["author"].get<std::string>();
    if (j.contains("date")) {
        const std::string s = j["date"].get<std::string>();
        Date dt;
        if (std::sscanf(s.c_str(), "%d-%d-%d", &dt.year, &dt.month, &dt.day) == 3)
            d.date = dt;
    }
    if (j.contains("switch_url")) d.switch_url = j["switch_url"].get<std::string>();
    return d;
}

}  // namespace

size_t store_documents(const std::vector<Document>& docs, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw MalformedFile("cannot open store " + path);
    for (const auto& d : docs) out << doc_to_json(d).dump() << '\n';
    if (!out) throw MalformedFile("write failed for " + path);
    return docs.size();
}

LoadResult load_documents(const std::string& path, const DocFilter& filter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedFile("cannot open store " + path);
    LoadResult r;
    std::unordered_map<std::string, size_t> by_id;  // id -> index in r.docs
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        Document d;
        try {
            d = doc_from_json(json::parse(line));
        } catch (const std::exception& e) {
            r.warnings.push_back(path + ":" + std::to_string(line_no) +
                                 ": store corrupt: " + e.what());
            continue;
        }
        auto it = by_id.find(d.id);
        if (it != by_id.end()) {
            r.docs[it->second] = std::move(d);  // last record wins
        } else {
            by_id[d.id] = r.docs.size();
            r.docs.push_back(std::move(d));
        }
    }
    std::erase_if(r.docs, [&](const Document& d) {
        if (filter.lang && d.lang != *filter.lang) return true;
        if (filter.date_min && (!d.date || days_from_civil(*d.date) <
                                               days_from_civil(*filter.date_min)))
            return true;
        if (filter.date_max && (!d.date || days_from_civil(*d.date) >
                                               days_from_civil(*filter.date_max)))
            return true;
        return false;
    });
    return r;
}

size_t store_pages(const std::vector<RawPage>& pages, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw MalformedFile("cannot open store " + path);
    for (const auto& p : pages) {
        json j{{"url", p.url},
               {"fetched_at", p.fetched_at},
               {"status", p.status},
               {"body", p.body}};
        if (p.lang_hint) j["lang_hint"] = to_string(*p.lang_hint);
        out << j.dump() << '\n';
    }
    if (!out) throw MalformedFile("write failed for " + path);
    return pages.size();
}

PageLoadResult load_pages(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedFile("cannot open store " + path);
    PageLoadResult r;
    std::unordered_map<std::string, size_t> by_url;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            RawPage p;
            p.url = j.at("url").get<std::string>();
            p.fetched_at = j.value("fetched_at", int64_t{0});
            p.status = j.value("status", 0);
            p.body = j.value("body", std::string());
            if (j.contains("lang_hint"))
                p.lang_hint = parse_lang(j["lang_hint"].get<std::string>());
            auto it = by_url.find(p.url);
            if (it != by_url.end()) {
                r.pages[it->second] = std::move(p);
            } else {
                by_url[p.url] = r.pages.size();
                r.pages.push_back(std::move(p));
            }
        } catch (const std::exception& e) {
            r.warnings.push_back(path + ":" + std::to_string(line_no) +
                                 ": store corrupt: " + e.what());
        }
    }
    return r;
}

}  // namespace bitext::ingest
