#ifndef BITEXT_TRANSLATOR_HPP
#define BITEXT_TRANSLATOR_HPP

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "bitext/lang.hpp"

namespace bitext::translator {

/// The seam where an MT system would sit. The toolkit never trains models;
/// alignment quality is validated with lexicon and stub backends.
struct TranslatorSpec {
    enum class Kind { lexicon, external_command, cached_table, identity };
    Kind kind = Kind::identity;
    Lang src = Lang::zh;
    Lang tgt = Lang::pt;
    std::string resource;  // lexicon/table path, or a shell command template
    std::optional<std::string> cache_path;
    std::optional<std::string> fallback_lexicon;  // cached_table miss fallback
};

/// Exact-match token gloss table, `source<TAB>target1|target2|...` per line.
class Lexicon {
public:
    static Lexicon load(const std::string& path);
    static Lexicon from_entries(
        std::vector<std::pair<std::string, std::vector<std::string>>> entries);

    /// Ranked candidate list, or nullptr for unknown tokens.
    const std::vector<std::string>* lookup(const std::string& token) const;
    size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, std::vector<std::string>> entries_;
};

class Translator {
public:
    explicit Translator(TranslatorSpec spec);

    const TranslatorSpec& spec() const { return spec_; }

    /// Safe for concurrent use; with a cache configured the backend runs at
    /// most once per distinct sentence and results are persisted.
    std::vector<std::string> translate(const std::vector<std::string>& sentence) const;
    std::vector<std::vector<std::string>> translate_batch(
        const std::vector<std::vector<std::string>>& sentences) const;

    /// The gloss table when kind == lexicon (used for pseudo-queries).
    const Lexicon* lexicon() const { return lexicon_ ? lexicon_.get() : nullptr; }

private:
    std::vector<std::string> invoke_backend(const std::vector<std::string>& sentence) const;
    std::vector<std::vector<std::string>> invoke_backend_batch(
        const std::vector<std::vector<std::string>>& sentences) const;

    TranslatorSpec spec_;
    std::shared_ptr<Lexicon> lexicon_;
    std::shared_ptr<Lexicon> fallback_;
    std::unordered_map<std::string, std::string> table_;  // cached_table entries
    uint64_t backend_hash_ = 0;

    mutable std::shared_mutex cache_mu_;
    mutable std::unordered_map<std::string, std::string> cache_;
    mutable std::unique_ptr<std::ofstream> cache_out_;
};

std::vector<std::string> translate(const TranslatorSpec& spec,
                                   const std::vector<std::string>& sentence);

/// translate(spec_bc, translate(spec_ab, sentence)); throws PivotMismatch
/// when spec_ab.tgt != spec_bc.src.
std::vector<std::string> pivot_translate(const Translator& ab, const Translator& bc,
                                         const std::vector<std::string>& sentence);
std::vector<std::string> pivot_translate(const TranslatorSpec& ab,
                                         const TranslatorSpec& bc,
                                         const std::vector<std::string>& sentence);

}  // namespace bitext::translator

#endif  // BITEXT_TRANSLATOR_HPP
