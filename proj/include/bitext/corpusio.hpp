#ifndef BITEXT_CORPUSIO_HPP
#define BITEXT_CORPUSIO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bitext::corpusio {

struct SentencePair {
    std::string src;
    std::string tgt;
    double score = 1.0;
    std::string method = "manual";
    // provenance, kept by JSONL only
    std::string doc_pair_id;
    std::array<int, 2> src_span{-1, -1};
    std::array<int, 2> tgt_span{-1, -1};

    bool operator==(const SentencePair&) const = default;
};

struct CorpusStats {
    size_t n_sentences = 0;
    size_t n_words_src = 0, n_words_tgt = 0;
    size_t vocab_src = 0, vocab_tgt = 0;
    double mean_len_src = 0.0, mean_len_tgt = 0.0;  // |W| / |S| per side
};

using Tokens = std::vector<std::string>;

/// Exact counts over tokenized pairs. Throws EmptyCorpus.
CorpusStats compute_stats(const std::vector<std::pair<Tokens, Tokens>>& pairs);

/// The sampling generator, fully specified so samples are reproducible
/// across implementations: SplitMix64 (Steele et al.), bounded draws by
/// rejection sampling (reject values >= 2^64 - 2^64 mod n, then take % n).
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint64_t bounded(uint64_t n) {
        const uint64_t limit = n == 0 ? 0 : ~uint64_t{0} - (~uint64_t{0} % n + 1) % n;
        uint64_t x;
        do {
            x = next();
        } while (x > limit);
        return x % n;
    }
};

/// Uniform sample of n indices without replacement (partial Fisher-Yates).
std::vector<size_t> sample_indices(size_t corpus_size, size_t n, uint64_t seed);

/// Throws SampleTooLarge when n exceeds the corpus size.
std::vector<SentencePair> sample_for_qa(const std::vector<SentencePair>& pairs,
                                        size_t n, uint64_t seed);

/// Numbered review sheet: `idx<TAB>src<TAB>tgt<TAB>` with an empty verdict
/// column for manual accuracy checks.
void write_review_sheet(const std::vector<SentencePair>& sample,
                        const std::string& path);

enum class Format { tsv, jsonl, tmx };

Format parse_format(const std::string& name);

// TSV escaping: backslash escapes for tab, newline and backslash.
std::string escape_tsv(std::string_view s);
std::string unescape_tsv(std::string_view s);

void write_corpus(const std::vector<SentencePair>& pairs, Format format,
                  const std::string& path, const std::string& src_lang = "zh",
                  const std::string& tgt_lang = "pt");
std::vector<SentencePair> read_corpus(const std::string& path, Format format);

/// Exact-duplicate (src, tgt) removal, keeping first occurrences.
std::vector<SentencePair> dedup_exact(const std::vector<SentencePair>& pairs);

struct SplitResult {
    std::vector<SentencePair> train, dev, test;
};

/// Seeded split; sizes are user choices. Original order is kept inside each
/// part. Throws SampleTooLarge when n_dev + n_test exceeds the corpus.
SplitResult split_corpus(const std::vector<SentencePair>& pairs, size_t n_dev,
                         size_t n_test, uint64_t seed);

}  // namespace bitext::corpusio

#endif  // BITEXT_CORPUSIO_HPP
