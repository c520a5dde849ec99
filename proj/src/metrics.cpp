#include "bitext/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext::metrics {

namespace {

constexpr char kJoin = '\x1E';

struct OrderCounts {
    int64_t matches = 0;
    int64_t total = 0;
};

void check_config(const BleuConfig& cfg) {
    if (cfg.max_n < 1 || cfg.max_n > 9)
        throw Error("BleuConfig.max_n must be in [1,9]");
}

Tokens folded(const Tokens& toks, bool fold) {
    if (!fold) return toks;
    Tokens out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(utf8::to_lower(t));
    return out;
}

/// Clipped n-gram matches of hyp against ref, accumulated per order.
void accumulate(const Tokens& hyp, const Tokens& ref, int max_n,
                std::vector<OrderCounts>& acc) {
    for (int n = 1; n <= max_n; n++) {
        std::unordered_map<std::string, int64_t> ref_counts;
        if (ref.size() + 1 > static_cast<size_t>(n)) {
            for (size_t i = 0; i + n <= ref.size(); i++) {
                std::string g = ref[i];
                for (int k = 1; k < n; k++) g += kJoin + ref[i + k];
                ref_counts[g]++;
            }
        }
        std::unordered_map<std::string, int64_t> hyp_counts;
        int64_t total = 0;
        if (hyp.size() + 1 > static_cast<size_t>(n)) {
            for (size_t i = 0; i + n <= hyp.size(); i++) {
                std::string g = hyp[i];
                for (int k = 1; k < n; k++) g += kJoin + hyp[i + k];
                hyp_counts[g]++;
                total++;
            }
        }
        int64_t matches = 0;
        for (const auto& [g, c] : hyp_counts) {
            auto it = ref_counts.find(g);
            if (it != ref_counts.end()) matches += std::min(c, it->second);
        }
        acc[n - 1].matches += matches;
        acc[n - 1].total += total;
    }
}

BleuScore finish(const std::vector<OrderCounts>& acc, size_t hyp_len, size_t ref_len,
                 BleuConfig::Smoothing smoothing) {
    BleuScore s;
    s.hyp_len = hyp_len;
    s.ref_len = ref_len;
    double log_sum = 0.0;
    bool zero = false;
    for (const auto& oc : acc) {
        double p;
        if (oc.matches > 0) {
            p = static_cast<double>(oc.matches) / static_cast<double>(oc.total);
        } else if (smoothing == BleuConfig::Smoothing::add_one_on_zero) {
            p = 1.0 / (2.0 * static_cast<double>(std::max<int64_t>(oc.total, 1)));
        } else {
            p = 0.0;
            zero = true;
        }
        s.precisions.push_back(p);
        if (p > 0) log_sum += std::log(p);
    }
    if (hyp_len == 0) {
        s.brevity_penalty = 0.0;
        s.score = 0.0;
        return s;
    }
    s.brevity_penalty =
        hyp_len >= ref_len
            ? 1.0
            : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    s.score = zero ? 0.0
                   : s.brevity_penalty *
                         std::exp(log_sum / static_cast<double>(acc.size()));
    return s;
}

}  // namespace

BleuScore sentence_bleu(const Tokens& hyp, const Tokens& ref, const BleuConfig& cfg) {
    check_config(cfg);
    if (ref.empty()) throw EmptyReference();
    Tokens h = folded(hyp, cfg.case_insensitive);
    Tokens r = folded(ref, cfg.case_insensitive);
    std::vector<OrderCounts> acc(cfg.max_n);
    accumulate(h, r, cfg.max_n, acc);
    return finish(acc, h.size(), r.size(), cfg.smoothing);
}

BleuScore corpus_bleu(const std::vector<std::pair<Tokens, Tokens>>& pairs,
                      const BleuConfig& cfg) {
    check_config(cfg);
    if (pairs.empty()) throw EmptyCorpus("corpus_bleu: no pairs");
    std::vector<OrderCounts> acc(cfg.max_n);
    size_t hyp_len = 0, ref_len = 0;
    for (const auto& [hyp, ref] : pairs) {
        if (ref.empty()) throw EmptyReference();
        Tokens h = folded(hyp, cfg.case_insensitive);
        Tokens r = folded(ref, cfg.case_insensitive);
        accumulate(h, r, cfg.max_n, acc);
        hyp_len += h.size();
        ref_len += r.size();
    }
    return finish(acc, hyp_len, ref_len, cfg.smoothing);
}

double sign_test(const std::vector<double>& scores_a,
                 const std::vector<double>& scores_b) {
    if (scores_a.size() != scores_b.size()) throw LengthMismatch();
    int64_t wins = 0, losses = 0;
    for (size_t i = 0; i < scores_a.size(); i++) {
        if (scores_a[i] > scores_b[i]) wins++;
        else if (scores_a[i] < scores_b[i]) losses++;
    }
    const int64_t n = wins + losses;
    if (n == 0) return 1.0;
    const int64_t m = std::min(wins, losses);
    // two-sided: 2 * P[X <= m], X ~ Binomial(n, 1/2), via log-space terms
    long double p = 0.0L;
    const long double ln2 = std::log(2.0L);
    for (int64_t i = 0; i <= m; i++) {
        long double lc = std::lgammal(static_cast<long double>(n) + 1) -
                         std::lgammal(static_cast<long double>(i) + 1) -
                         std::lgammal(static_cast<long double>(n - i) + 1);
        p += std::expl(lc - static_cast<long double>(n) * ln2);
    }
    double result = static_cast<double>(2.0L * p);
    return result > 1.0 ? 1.0 : result;
}

}  // namespace bitext::metrics
