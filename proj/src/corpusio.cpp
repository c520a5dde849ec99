#include "bitext/corpusio.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "bitext/errors.hpp"
#include "bitext/html.hpp"
#include "bitext/utf8.hpp"

namespace bitext::corpusio {

using nlohmann::json;

CorpusStats compute_stats(const std::vector<std::pair<Tokens, Tokens>>& pairs) {
    if (pairs.empty()) throw EmptyCorpus("compute_stats: no pairs");
    CorpusStats s;
    s.n_sentences = pairs.size();
    std::unordered_set<std::string> vs, vt;
    for (const auto& [src, tgt] : pairs) {
        s.n_words_src += src.size();
        s.n_words_tgt += tgt.size();
        vs.insert(src.begin(), src.end());
        vt.insert(tgt.begin(), tgt.end());
    }
    s.vocab_src = vs.size();
    s.vocab_tgt = vt.size();
    s.mean_len_src = static_cast<double>(s.n_words_src) / static_cast<double>(s.n_sentences);
    s.mean_len_tgt = static_cast<double>(s.n_words_tgt) / static_cast<double>(s.n_sentences);
    return s;
}

std::vector<size_t> sample_indices(size_t corpus_size, size_t n, uint64_t seed) {
    std::vector<size_t> idx(corpus_size);
    std::iota(idx.begin(), idx.end(), size_t{0});
    SplitMix64 rng(seed);
    for (size_t i = 0; i < n && i + 1 < corpus_size; i++) {
        size_t j = i + static_cast<size_t>(rng.bounded(corpus_size - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    return idx;
}

std::vector<SentencePair> sample_for_qa(const std::vector<SentencePair>& pairs,
                                        size_t n, uint64_t seed) {
    if (n > pairs.size())
        throw SampleTooLarge("sample of " + std::to_string(n) + " from " +
                             std::to_string(pairs.size()));
    std::vector<SentencePair> out;
    out.reserve(n);
    for (size_t i : sample_indices(pairs.size(), n, seed)) out.push_back(pairs[i]);
    return out;
}

void write_review_sheet(const std::vector<SentencePair>& sample,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MalformedFile("cannot write " + path);
    out << "# idx\tsrc\ttgt\tverdict\n";
    for (size_t i = 0; i < sample.size(); i++) {
        out << (i + 1) << '\t' << escape_tsv(sample[i].src) << '\t'
            << escape_tsv(sample[i].tgt) << "\t\n";
    }
}

Format parse_format(const std::string& name) {
    if (name == "tsv") return Format::tsv;
    if (name == "jsonl") return Format::jsonl;
    if (name == "tmx") return Format::tmx;
    throw ConfigInvalid("unknown corpus format: " + name);
}

std::string escape_tsv(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_tsv(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); i++) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out += s[i];
            continue;
        }
        switch (s[++i]) {
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case '\\': out += '\\'; break;
            default:
                out += '\\';
                out += s[i];
        }
    }
    return out;
}

namespace {

std::string format_score(double score) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", score);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void write_tsv(const std::vector<SentencePair>& pairs, std::ostream& out) {
    for (const auto& p : pairs) {
        out << escape_tsv(p.src) << '\t' << escape_tsv(p.tgt) << '\t'
            << format_score(p.score) << '\t' << p.method << '\n';
    }
}

std::vector<SentencePair> read_tsv(std::istream& in, const std::string& path) {
    std::vector<SentencePair> pairs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        size_t b = 0;
        while (b <= line.size()) {
            size_t e = line.find('\t', b);
            if (e == std::string::npos) e = line.size();
            fields.push_back(line.substr(b, e - b));
            b = e + 1;
        }
        if (fields.size() != 4)
            throw MalformedFile(path + ":" + std::to_string(line_no) +
                                ": expected 4 tab-separated fields, got " +
                                std::to_string(fields.size()));
        SentencePair p;
        p.src = unescape_tsv(fields[0]);
        p.tgt = unescape_tsv(fields[1]);
        try {
            p.score = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw MalformedFile(path + ":" + std::to_string(line_no) +
                                ": bad score: " + fields[2]);
        }
        p.method = fields[3];
        pairs.push_back(std::move(p));
    }
    return pairs;
}

void write_jsonl(const std::vector<SentencePair>& pairs, std::ostream& out) {
    for (const auto& p : pairs) {
        json j{{"src", p.src}, {"tgt", p.tgt}, {"score", p.score}, {"method", p.method}};
        if (!p.doc_pair_id.empty()) j["doc_pair_id"] = p.doc_pair_id;
        if (p.src_span[0] >= 0) j["src_span"] = p.src_span;
        if (p.tgt_span[0] >= 0) j["tgt_span"] = p.tgt_span;
        out << j.dump() << '\n';
    }
}

std::vector<SentencePair> read_jsonl(std::istream& in, const std::string& path) {
    std::vector<SentencePair> pairs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            SentencePair p;
            p.src = j.at("src").get<std::string>();
            p.tgt = j.at("tgt").get<std::string>();
            p.score = j.value("score", 1.0);
            p.method = j.value("method", std::string("manual"));
            p.doc_pair_id = j.value("doc_pair_id", std::string());
            if (j.contains("src_span"))
                p.src_span = {j["src_span"][0].get<int>(), j["src_span"][1].get<int>()};
            if (j.contains("tgt_span"))
                p.tgt_span = {j["tgt_span"][0].get<int>(), j["tgt_span"][1].get<int>()};
            pairs.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw MalformedFile(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return pairs;
}

void write_tmx(const std::vector<SentencePair>& pairs, std::ostream& out,
               const std::string& src_lang, const std::string& tgt_lang) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<tmx version=\"1.4\">\n";
    out << "  <header creationtool=\"bitext\" creationtoolversion=\"0.1\" "
           "segtype=\"sentence\" o-tmf=\"bitext\" adminlang=\"en\" srclang=\""
        << xml_escape(src_lang) << "\" datatype=\"plaintext\"/>\n";
    out << "  <body>\n";
    for (const auto& p : pairs) {
        out << "    <tu>\n";
        out << "      <prop type=\"score\">" << format_score(p.score) << "</prop>\n";
        out << "      <prop type=\"method\">" << xml_escape(p.method) << "</prop>\n";
        out << "      <tuv xml:lang=\"" << xml_escape(src_lang) << "\"><seg>"
            << xml_escape(p.src) << "</seg></tuv>\n";
        out << "      <tuv xml:lang=\"" << xml_escape(tgt_lang) << "\"><seg>"
            << xml_escape(p.tgt) << "</seg></tuv>\n";
        out << "    </tu>\n";
    }
    out << "  </body>\n</tmx>\n";
}

/// Minimal TMX reader for the structure the writer emits (plus entity and
/// attribute-order tolerance). Positions are reported on errors.
struct TmxReader {
    std::string_view s;
    std::string path;
    size_t i = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw MalformedFile(path + ": offset " + std::to_string(i) + ": " + msg);
    }

    void skip_ws() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r'))
            i++;
    }

    bool peek_tag(std::string_view name) {
        skip_ws();
        if (i >= s.size() || s[i] != '<') return false;
        size_t b = i + 1;
        return s.compare(b, name.size(), name) == 0 &&
               (b + name.size() >= s.size() || s[b + name.size()] == '>' ||
                s[b + name.size()] == ' ' || s[b + name.size()] == '/');
    }

    /// Consumes `<name ...>`; returns the attribute string. `self_closed`
    /// reports a trailing `/`.
    std::string open_tag(std::string_view name, bool* self_closed = nullptr) {
        skip_ws();
        if (!peek_tag(name)) fail("expected <" + std::string(name) + ">");
        size_t gt = s.find('>', i);
        if (gt == std::string_view::npos) fail("unterminated tag");
        std::string attrs(s.substr(i + 1 + name.size(), gt - i - 1 - name.size()));
        bool sc = !attrs.empty() && attrs.back() == '/';
        if (sc) attrs.pop_back();
        if (self_closed) *self_closed = sc;
        i = gt + 1;
        return attrs;
    }

    void close_tag(std::string_view name) {
        skip_ws();
        std::string expect = "</" + std::string(name) + ">";
        if (s.compare(i, expect.size(), expect) != 0)
            fail("expected " + expect);
        i += expect.size();
    }

    std::string text_until_lt() {
        size_t lt = s.find('<', i);
        if (lt == std::string_view::npos) fail("unterminated text");
        std::string raw(s.substr(i, lt - i));
        i = lt;
        return html::decode_entities(raw);
    }

    static std::string attr(const std::string& attrs, std::string_view key) {
        std::string pat = std::string(key) + "=\"";
        size_t p = attrs.find(pat);
        if (p == std::string::npos) return {};
        size_t b = p + pat.size();
        size_t e = attrs.find('"', b);
        return attrs.substr(b, e == std::string::npos ? std::string::npos : e - b);
    }
};

std::vector<SentencePair> read_tmx(std::string_view content, const std::string& path) {
    TmxReader r{content, path};
    r.skip_ws();
    if (r.s.compare(r.i, 5, "<?xml") == 0) {
        size_t e = r.s.find("?>", r.i);
        if (e == std::string_view::npos) r.fail("unterminated xml declaration");
        r.i = e + 2;
    }
    r.open_tag("tmx");
    bool sc = false;
    r.open_tag("header", &sc);
    if (!sc) r.close_tag("header");
    r.open_tag("body");
    std::vector<SentencePair> pairs;
    while (r.peek_tag("tu")) {
        r.open_tag("tu");
        SentencePair p;
        std::vector<std::pair<std::string, std::string>> tuvs;  // (lang, seg)
        for (;;) {
            if (r.peek_tag("prop")) {
                auto attrs = r.open_tag("prop");
                std::string type = TmxReader::attr(attrs, "type");
                std::string value = r.text_until_lt();
                r.close_tag("prop");
                if (type == "score") {
                    try {
                        p.score = std::stod(value);
                    } catch (const std::exception&) {
                        r.fail("bad score prop: " + value);
                    }
                } else if (type == "method") {
                    p.method = value;
                }
            } else if (r.peek_tag("tuv")) {
                auto attrs = r.open_tag("tuv");
                std::string lang = TmxReader::attr(attrs, "xml:lang");
                if (lang.empty()) lang = TmxReader::attr(attrs, "lang");
                r.open_tag("seg");
                std::string seg = r.text_until_lt();
                r.close_tag("seg");
                r.close_tag("tuv");
                tuvs.emplace_back(lang, seg);
            } else {
                break;
            }
        }
        r.close_tag("tu");
        if (tuvs.size() != 2) r.fail("tu must hold exactly two tuv entries");
        p.src = tuvs[0].second;
        p.tgt = tuvs[1].second;
        pairs.push_back(std::move(p));
    }
    r.close_tag("body");
    r.close_tag("tmx");
    return pairs;
}

}  // namespace

void write_corpus(const std::vector<SentencePair>& pairs, Format format,
                  const std::string& path, const std::string& src_lang,
                  const std::string& tgt_lang) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MalformedFile("cannot write " + path);
    switch (format) {
        case Format::tsv: write_tsv(pairs, out); break;
        case Format::jsonl: write_jsonl(pairs, out); break;
        case Format::tmx: write_tmx(pairs, out, src_lang, tgt_lang); break;
    }
    if (!out) throw MalformedFile("write failed for " + path);
}

std::vector<SentencePair> read_corpus(const std::string& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedFile("cannot open " + path);
    switch (format) {
        case Format::tsv: return read_tsv(in, path);
        case Format::jsonl: return read_jsonl(in, path);
        case Format::tmx: {
            std::ostringstream ss;
            ss << in.rdbuf();
            std::string content = ss.str();
            return read_tmx(content, path);
        }
    }
    return {};
}

std::vector<SentencePair> dedup_exact(const std::vector<SentencePair>& pairs) {
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<SentencePair> out;
    for (const auto& p : pairs)
        if (seen.insert({p.src, p.tgt}).second) out.push_back(p);
    return out;
}

SplitResult split_corpus(const std::vector<SentencePair>& pairs, size_t n_dev,
                         size_t n_test, uint64_t seed) {
    if (n_dev + n_test > pairs.size())
        throw SampleTooLarge("dev+test exceeds corpus size");
    auto idx = sample_indices(pairs.size(), n_dev + n_test, seed);
    std::vector<size_t> dev(idx.begin(), idx.begin() + n_dev);
    std::vector<size_t> test(idx.begin() + n_dev, idx.end());
    std::sort(dev.begin(), dev.end());
    std::sort(test.begin(), test.end());
    std::vector<char> held(pairs.size(), 0);
    SplitResult r;
    for (size_t i : dev) {
        r.dev.push_back(pairs[i]);
        held[i] = 1;
    }
    for (size_t i : test) {
        r.test.push_back(pairs[i]);
        held[i] = 1;
    }
    for (size_t i = 0; i < pairs.size(); i++)
        if (!held[i]) r.train.push_back(pairs[i]);
    return r;
}

}  // namespace bitext::corpusio
