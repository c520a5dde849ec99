#include "bitext/translator.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext::translator {

namespace {

std::string join_tokens(const std::vector<std::string>& toks) {
    std::string s;
    for (size_t i = 0; i < toks.size(); i++) {
        if (i) s += ' ';
        s += toks[i];
    }
    return s;
}

std::vector<std::string> split_tokens(std::string_view line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') i++;
        size_t b = i;
        while (i < line.size() && line[i] != ' ') i++;
        if (i > b) out.emplace_back(line.substr(b, i - b));
    }
    return out;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendUnavailable("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

/// Runs a shell command with stdin/stdout redirected through temp files.
/// One line in, one line out; the contract requires line-aligned output.
std::vector<std::string> run_command(const std::string& cmd,
                                     const std::vector<std::string>& input_lines) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();
    static std::atomic<uint64_t> counter{0};
    const auto tag = std::to_string(::getpid()) + "_" +
                     std::to_string(counter.fetch_add(1));
    const fs::path in_path = dir / ("bitext_mt_in_" + tag);
    const fs::path out_path = dir / ("bitext_mt_out_" + tag);
    struct Cleanup {
        fs::path a, b;
        ~Cleanup() {
            std::error_code ec;
            fs::remove(a, ec);
            fs::remove(b, ec);
        }
    } cleanup{in_path, out_path};

    {
        std::ofstream in(in_path, std::ios::binary);
        for (const auto& l : input_lines) in << l << '\n';
        if (!in) throw BackendUnavailable("cannot write backend input");
    }
    const std::string full =
        cmd + " < " + in_path.string() + " > " + out_path.string();
    int rc = std::system(full.c_str());
    if (rc == -1 || !WIFEXITED(rc) || WEXITSTATUS(rc) != 0)
        throw BackendUnavailable("command failed: " + cmd);
    auto out_lines = read_lines(out_path.string());
    if (out_lines.size() != input_lines.size())
        throw MalformedBackendOutput(
            "expected " + std::to_string(input_lines.size()) + " lines, got " +
            std::to_string(out_lines.size()));
    return out_lines;
}

uint64_t spec_hash(const TranslatorSpec& s) {
    std::string key = std::to_string(static_cast<int>(s.kind));
    key += '|';
    key += to_string(s.src);
    key += '|';
    key += to_string(s.tgt);
    key += '|';
    key += s.resource;
    if (s.fallback_lexicon) {
        key += '|';
        key += *s.fallback_lexicon;
    }
    return utf8::fnv1a(key);
}

}  // namespace

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendUnavailable("cannot open lexicon " + path);
    Lexicon lex;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw MalformedFile(path + ":" + std::to_string(line_no) +
                                ": expected `source<TAB>target1|target2|...`");
        std::vector<std::string> cands;
        size_t b = tab + 1;
        while (b <= line.size()) {
            size_t e = line.find('|', b);
            if (e == std::string::npos) e = line.size();
            if (e > b) cands.emplace_back(line.substr(b, e - b));
            b = e + 1;
        }
        if (cands.empty())
            throw MalformedFile(path + ":" + std::to_string(line_no) +
                                ": empty candidate list");
        lex.entries_[line.substr(0, tab)] = std::move(cands);
    }
    return lex;
}

Lexicon Lexicon::from_entries(
    std::vector<std::pair<std::string, std::vector<std::string>>> entries) {
    Lexicon lex;
    for (auto& [src, cands] : entries) {
        if (cands.empty()) throw MalformedFile("empty candidate list for " + src);
        lex.entries_[src] = std::move(cands);
    }
    return lex;
}

const std::vector<std::string>* Lexicon::lookup(const std::string& token) const {
    auto it = entries_.find(token);
    return it == entries_.end() ? nullptr : &it->second;
}

Translator::Translator(TranslatorSpec spec) : spec_(std::move(spec)) {
    using Kind = TranslatorSpec::Kind;
    if (spec_.kind != Kind::identity && spec_.src == spec_.tgt)
        throw Error("translator: src == tgt requires the identity backend");
    switch (spec_.kind) {
        case Kind::identity:
            break;
        case Kind::lexicon:
            lexicon_ = std::make_shared<Lexicon>(Lexicon::load(spec_.resource));
            break;
        case Kind::external_command:
            if (spec_.resource.empty())
                throw BackendUnavailable("empty command template");
            break;
        case Kind::cached_table: {
            for (const auto& line : read_lines(spec_.resource)) {
                if (line.empty() || line[0] == '#') continue;
                size_t tab = line.find('\t');
                if (tab == std::string::npos)
                    throw MalformedFile(spec_.resource + ": expected `sentence<TAB>translation`");
                table_[line.substr(0, tab)] = line.substr(tab + 1);  // last wins
            }
            if (spec_.fallback_lexicon)
                fallback_ = std::make_shared<Lexicon>(Lexicon::load(*spec_.fallback_lexicon));
            break;
        }
    }
    backend_hash_ = spec_hash(spec_);
    if (spec_.cache_path) {
        const std::string header = "# backend " + std::to_string(backend_hash_);
        bool fresh = true;
        if (std::ifstream in(*spec_.cache_path, std::ios::binary); in) {
            std::string line;
            if (std::getline(in, line) && line == header) {
                fresh = false;
                while (std::getline(in, line)) {
                    if (line.empty() || line[0] == '#') continue;
                    size_t tab = line.find('\t');
                    if (tab == std::string::npos) continue;
                    cache_[line.substr(0, tab)] = line.substr(tab + 1);  // last wins
                }
            }
        }
        // a cache written for a different backend is stale: start over
        auto mode = fresh ? std::ios::trunc : std::ios::app;
        cache_out_ = std::make_unique<std::ofstream>(*spec_.cache_path,
                                                     std::ios::binary | mode);
        if (!*cache_out_)
            throw BackendUnavailable("cannot open cache " + *spec_.cache_path);
        if (fresh) (*cache_out_) << header << '\n' << std::flush;
    }
}

std::vector<std::string> Translator::invoke_backend(
    const std::vector<std::string>& sentence) const {
    using Kind = TranslatorSpec::Kind;
    switch (spec_.kind) {
        case Kind::identity:
            return sentence;
        case Kind::lexicon: {
            std::vector<std::string> out;
            out.reserve(sentence.size());
            for (const auto& tok : sentence) {
                const auto* cands = lexicon_->lookup(tok);
                out.push_back(cands ? (*cands)[0] : tok);  // unknown: pass through
            }
            return out;
        }
        case Kind::cached_table: {
            auto it = table_.find(join_tokens(sentence));
            if (it != table_.end()) return split_tokens(it->second);
            if (fallback_) {
                std::vector<std::string> out;
                out.reserve(sentence.size());
                for (const auto& tok : sentence) {
                    const auto* cands = fallback_->lookup(tok);
                    out.push_back(cands ? (*cands)[0] : tok);
                }
                return out;
            }
            return sentence;
        }
        case Kind::external_command: {
            auto lines = run_command(spec_.resource, {join_tokens(sentence)});
            return split_tokens(lines[0]);
        }
    }
    return sentence;
}

std::vector<std::vector<std::string>> Translator::invoke_backend_batch(
    const std::vector<std::vector<std::string>>& sentences) const {
    if (spec_.kind == TranslatorSpec::Kind::external_command) {
        std::vector<std::string> lines;
        lines.reserve(sentences.size());
        for (const auto& s : sentences) lines.push_back(join_tokens(s));
        auto out_lines = run_command(spec_.resource, lines);
        std::vector<std::vector<std::string>> out;
        out.reserve(out_lines.size());
        for (const auto& l : out_lines) out.push_back(split_tokens(l));
        return out;
    }
    std::vector<std::vector<std::string>> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(invoke_backend(s));
    return out;
}

std::vector<std::string> Translator::translate(
    const std::vector<std::string>& sentence) const {
    if (!spec_.cache_path) return invoke_backend(sentence);
    const std::string key = join_tokens(sentence);
    {
        std::shared_lock lock(cache_mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return split_tokens(it->second);
    }
    std::unique_lock lock(cache_mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return split_tokens(it->second);
    auto result = invoke_backend(sentence);
    const std::string val = join_tokens(result);
    cache_[key] = val;
    (*cache_out_) << key << '\t' << val << '\n' << std::flush;
    return result;
}

std::vector<std::vector<std::string>> Translator::translate_batch(
    const std::vector<std::vector<std::string>>& sentences) const {
    if (!spec_.cache_path) return invoke_backend_batch(sentences);
    std::vector<std::string> keys;
    keys.reserve(sentences.size());
    for (const auto& s : sentences) keys.push_back(join_tokens(s));

    std::vector<size_t> missing;
    {
        std::shared_lock lock(cache_mu_);
        for (size_t i = 0; i < keys.size(); i++)
            if (!cache_.count(keys[i])) missing.push_back(i);
    }
    if (!missing.empty()) {
        std::unique_lock lock(cache_mu_);
        std::vector<size_t> still;
        std::vector<std::vector<std::string>> to_run;
        std::unordered_map<std::string, size_t> seen;  // dedup within the batch
        for (size_t i : missing) {
            if (cache_.count(keys[i]) || seen.count(keys[i])) continue;
            seen[keys[i]] = to_run.size();
            still.push_back(i);
            to_run.push_back(sentences[i]);
        }
        if (!to_run.empty()) {
            auto results = invoke_backend_batch(to_run);
            for (size_t k = 0; k < still.size(); k++) {
                const std::string val = join_tokens(results[k]);
                cache_[keys[still[k]]] = val;
                (*cache_out_) << keys[still[k]] << '\t' << val << '\n';
            }
            cache_out_->flush();
        }
    }
    std::vector<std::vector<std::string>> out;
    out.reserve(sentences.size());
    std::shared_lock lock(cache_mu_);
    for (const auto& k : keys) out.push_back(split_tokens(cache_.at(k)));
    return out;
}

std::vector<std::string> translate(const TranslatorSpec& spec,
                                   const std::vector<std::string>& sentence) {
    return Translator(spec).translate(sentence);
}

std::vector<std::string> pivot_translate(const Translator& ab, const Translator& bc,
                                         const std::vector<std::string>& sentence) {
    if (ab.spec().tgt != bc.spec().src)
        throw PivotMismatch(std::string("pivot languages disagree: ") +
                            to_string(ab.spec().tgt) + " vs " +
                            to_string(bc.spec().src));
    return bc.translate(ab.translate(sentence));
}

std::vector<std::string> pivot_translate(const TranslatorSpec& ab,
                                         const TranslatorSpec& bc,
                                         const std::vector<std::string>& sentence) {
    Translator t_ab(ab), t_bc(bc);
    return pivot_translate(t_ab, t_bc, sentence);
}

}  // namespace bitext::translator
