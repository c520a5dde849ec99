#include "bitext/hieralign.hpp"

#include <algorithm>
#include <cmath>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext::hieralign {

const char* to_string(UnitPair::Method m) {
    switch (m) {
        case UnitPair::Method::count_rule: return "count_rule";
        case UnitPair::Method::bleu_anchor: return "bleu_anchor";
        case UnitPair::Method::bleu_merge: return "bleu_merge";
        case UnitPair::Method::length_fill: return "length_fill";
    }
    return "?";
}

BleuMatrix compute_bleu_matrix(const Units& src_units, const Units& tgt_units,
                               const translator::Translator& t,
                               const metrics::BleuConfig& bleu) {
    BleuMatrix m;
    m.rows = src_units.size();
    m.cols = tgt_units.size();
    m.scores.assign(m.rows * m.cols, 0.0);
    const auto translated = t.translate_batch(src_units);
    for (size_t i = 0; i < m.rows; i++) {
        for (size_t j = 0; j < m.cols; j++) {
            if (tgt_units[j].empty()) continue;  // nothing to score against
            m.at(i, j) = metrics::sentence_bleu(translated[i], tgt_units[j], bleu).score;
        }
    }
    return m;
}

std::vector<std::pair<int, int>> find_anchors(const BleuMatrix& m, double theta) {
    std::vector<std::pair<int, int>> cands;
    for (size_t i = 0; i < m.rows; i++) {
        size_t best_j = 0;
        bool unique = false;
        double best = -1;
        for (size_t j = 0; j < m.cols; j++) {
            if (m.at(i, j) > best) {
                best = m.at(i, j);
                best_j = j;
                unique = true;
            } else if (m.at(i, j) == best) {
                unique = false;
            }
        }
        if (!unique || best < theta) continue;
        bool col_max = true;
        for (size_t k = 0; k < m.rows && col_max; k++)
            if (k != i && m.at(k, best_j) >= best) col_max = false;
        if (col_max) cands.emplace_back(static_cast<int>(i), static_cast<int>(best_j));
    }
    // candidates have distinct rows and columns; keep the longest strictly
    // increasing subsequence in j, ties resolved by total score
    const size_t n = cands.size();
    std::vector<int> len(n, 1);
    std::vector<double> tot(n);
    std::vector<int> prev(n, -1);
    for (size_t c = 0; c < n; c++) {
        tot[c] = m.at(cands[c].first, cands[c].second);
        for (size_t p = 0; p < c; p++) {
            if (cands[p].second >= cands[c].second) continue;
            double cand_tot = tot[p] + m.at(cands[c].first, cands[c].second);
            if (len[p] + 1 > len[c] ||
                (len[p] + 1 == len[c] && cand_tot > tot[c])) {
                len[c] = len[p] + 1;
                tot[c] = cand_tot;
                prev[c] = static_cast<int>(p);
            }
        }
    }
    int best_end = -1;
    for (size_t c = 0; c < n; c++) {
        if (best_end < 0 || len[c] > len[best_end] ||
            (len[c] == len[best_end] && tot[c] > tot[best_end]))
            best_end = static_cast<int>(c);
    }
    std::vector<std::pair<int, int>> anchors;
    for (int c = best_end; c >= 0; c = prev[c]) anchors.push_back(cands[c]);
    std::reverse(anchors.begin(), anchors.end());
    return anchors;
}

std::pair<std::vector<MergeGroup>, double> bleu_merge_dp(
    int rows, int cols,
    const std::function<double(int, int, int, int)>& group_score) {
    const int R = rows, C = cols;
    const auto idx = [C](int x, int y) { return x * (C + 1) + y; };
    const double neg = -1.0;
    std::vector<double> best((R + 1) * (C + 1), neg);
    std::vector<int> back((R + 1) * (C + 1), -1);  // encodes (dx, dy)
    best[0] = 0.0;
    struct Step {
        int dx, dy;
        bool aligned;
    };
    // evaluation order fixes tie-breaking: earlier steps win ties
    static constexpr Step steps[] = {
        {1, 0, false}, {0, 1, false}, {1, 1, true}, {1, 2, true}, {2, 1, true}};
    for (int x = 0; x <= R; x++) {
        for (int y = 0; y <= C; y++) {
            if (x == 0 && y == 0) continue;
            double b = neg;
            int arg = -1;
            for (int s = 0; s < 5; s++) {
                const Step& st = steps[s];
                int px = x - st.dx, py = y - st.dy;
                if (px < 0 || py < 0 || best[idx(px, py)] < 0) continue;
                double v = best[idx(px, py)];
                if (st.aligned) v += group_score(px, st.dx, py, st.dy);
                if (v > b) {
                    b = v;
                    arg = s;
                }
            }
            best[idx(x, y)] = b;
            back[idx(x, y)] = arg;
        }
    }
    std::vector<MergeGroup> groups;
    int x = R, y = C;
    while (x != 0 || y != 0) {
        const Step& st = steps[back[idx(x, y)]];
        x -= st.dx;
        y -= st.dy;
        if (st.aligned)
            groups.push_back({{x, x + st.dx}, {y, y + st.dy},
                              group_score(x, st.dx, y, st.dy)});
    }
    std::reverse(groups.begin(), groups.end());
    return {std::move(groups), best[idx(R, C)]};
}

namespace {

constexpr double kPrior11 = 0.89;
constexpr double kPrior12 = 0.089;  // same for 2-1
constexpr double kPrior01 = 0.01;   // same for 1-0
constexpr double kSkipDeviation = 2.0;  // Gaussian term charged to 1-0/0-1

double gauss_cost(double ratio, const LengthStats& st) {
    const double d = ratio - st.mean;
    return d * d / (2.0 * st.var);
}

}  // namespace

std::pair<std::vector<MergeGroup>, double> length_dp(
    const std::vector<double>& src_lens, const std::vector<double>& tgt_lens,
    const LengthStats& stats) {
    const int R = static_cast<int>(src_lens.size());
    const int C = static_cast<int>(tgt_lens.size());
    const auto idx = [C](int x, int y) { return x * (C + 1) + y; };
    const double inf = 1e18;
    std::vector<double> best((R + 1) * (C + 1), inf);
    std::vector<int> back((R + 1) * (C + 1), -1);
    best[0] = 0.0;
    struct Step {
        int dx, dy;
        double prior;
    };
    static constexpr Step steps[] = {{1, 1, kPrior11},
                                     {1, 2, kPrior12},
                                     {2, 1, kPrior12},
                                     {1, 0, kPrior01},
                                     {0, 1, kPrior01}};
    auto cost = [&](int px, int py, const Step& st) {
        double c = -std::log(st.prior);
        if (st.dx == 0 || st.dy == 0) return c + kSkipDeviation;
        double s = 0, t = 0;
        for (int k = 0; k < st.dx; k++) s += src_lens[px + k];
        for (int k = 0; k < st.dy; k++) t += tgt_lens[py + k];
        if (s <= 0) s = 1;
        return c + gauss_cost(t / s, stats);
    };
    for (int x = 0; x <= R; x++) {
        for (int y = 0; y <= C; y++) {
            if (x == 0 && y == 0) continue;
            for (int s = 0; s < 5; s++) {
                const Step& st = steps[s];
                int px = x - st.dx, py = y - st.dy;
                if (px < 0 || py < 0 || best[idx(px, py)] >= inf) continue;
                double v = best[idx(px, py)] + cost(px, py, st);
                if (v < best[idx(x, y)]) {
                    best[idx(x, y)] = v;
                    back[idx(x, y)] = s;
                }
            }
        }
    }
    std::vector<MergeGroup> groups;
    int x = R, y = C;
    while (x != 0 || y != 0) {
        const Step& st = steps[back[idx(x, y)]];
        x -= st.dx;
        y -= st.dy;
        if (st.dx > 0 && st.dy > 0)
            groups.push_back({{x, x + st.dx}, {y, y + st.dy}, 0.0});
    }
    std::reverse(groups.begin(), groups.end());
    return {std::move(groups), best[idx(R, C)]};
}

namespace {

double unit_chars(const std::vector<std::string>& unit) {
    size_t n = 0;
    for (const auto& tok : unit) n += utf8::count(tok);
    return static_cast<double>(n);
}

}  // namespace

LengthStats estimate_length_stats(const std::vector<std::pair<int, int>>& anchors,
                                  const Units& src_units, const Units& tgt_units) {
    LengthStats st;
    std::vector<double> ratios;
    for (auto [i, j] : anchors) {
        double s = unit_chars(src_units[i]);
        double t = unit_chars(tgt_units[j]);
        if (s > 0) ratios.push_back(t / s);
    }
    st.n = static_cast<int>(ratios.size());
    if (ratios.empty()) return st;
    double sum = 0;
    for (double r : ratios) sum += r;
    st.mean = sum / ratios.size();
    double var = 0;
    for (double r : ratios) var += (r - st.mean) * (r - st.mean);
    st.var = var / ratios.size();
    // variance floor keeps the Gaussian cost usable on tiny samples
    st.var = std::max({st.var, 0.01 * st.mean * st.mean, 1e-4});
    return st;
}

namespace {

std::vector<std::string> concat_units(const Units& units, int begin, int n) {
    std::vector<std::string> out;
    for (int k = begin; k < begin + n; k++)
        out.insert(out.end(), units[k].begin(), units[k].end());
    return out;
}

/// Aligns one gap block (rows [r0,r1) x cols [c0,c1)) and appends pairs.
void fill_block(const BleuMatrix& m, int r0, int r1, int c0, int c1,
                const Units& src_units, const Units& tgt_units,
                const Units& src_translated, const HierConfig& cfg,
                UnitPair::Level level, std::vector<UnitPair>& out) {
    const int R = r1 - r0, C = c1 - c0;
    if (R <= 0 || C <= 0) return;  // nothing alignable: units are omitted

    auto group_bleu = [&](int si, int sn, int tj, int tn) {
        if (sn == 1 && tn == 1) return m.at(r0 + si, c0 + tj);
        auto hyp = concat_units(src_translated, r0 + si, sn);
        auto ref = concat_units(tgt_units, c0 + tj, tn);
        if (ref.empty()) return 0.0;
        return metrics::sentence_bleu(hyp, ref, cfg.bleu).score;
    };

    std::vector<MergeGroup> accepted;
    if (R <= cfg.max_gap && C <= cfg.max_gap) {
        auto [groups, total] = bleu_merge_dp(R, C, group_bleu);
        for (const auto& g : groups) {
            if (g.score >= cfg.theta_gap) accepted.push_back(g);
        }
    }
    for (const auto& g : accepted) {
        out.push_back({level,
                       {r0 + g.src.begin, r0 + g.src.end},
                       {c0 + g.tgt.begin, c0 + g.tgt.end},
                       g.score,
                       UnitPair::Method::bleu_merge});
    }

    // leftover sub-blocks between accepted groups go to the length pass
    LengthStats stats = cfg.fallback_length_stats.value_or(LengthStats{});
    // prefer per-pair stats when the caller estimated them (cfg carries them
    // via fallback; fill_gaps overrides with anchor stats when available)
    int pr = 0, pc = 0;
    auto run_length = [&](int br0, int br1, int bc0, int bc1) {
        if (br1 - br0 <= 0 || bc1 - bc0 <= 0) return;
        std::vector<double> sl, tl;
        for (int k = br0; k < br1; k++) sl.push_back(unit_chars(src_units[k]));
        for (int k = bc0; k < bc1; k++) tl.push_back(unit_chars(tgt_units[k]));
        auto [groups, cost] = length_dp(sl, tl, stats);
        (void)cost;
        for (const auto& g : groups) {
            double score = group_bleu(br0 - r0 + g.src.begin, g.src.size(),
                                      bc0 - c0 + g.tgt.begin, g.tgt.size());
            out.push_back({level,
                           {br0 + g.src.begin, br0 + g.src.end},
                           {bc0 + g.tgt.begin, bc0 + g.tgt.end},
                           score,
                           UnitPair::Method::length_fill});
        }
    };
    for (const auto& g : accepted) {
        run_length(r0 + pr, r0 + g.src.begin, c0 + pc, c0 + g.tgt.begin);
        pr = g.src.end;
        pc = g.tgt.end;
    }
    run_length(r0 + pr, r1, c0 + pc, c1);
}

}  // namespace

std::vector<UnitPair> fill_gaps(const BleuMatrix& m,
                                const std::vector<std::pair<int, int>>& anchors,
                                const Units& src_units, const Units& tgt_units,
                                const Units& src_translated, const HierConfig& cfg,
                                UnitPair::Level level) {
    HierConfig local = cfg;
    LengthStats st = estimate_length_stats(anchors, src_units, tgt_units);
    if (st.n >= 3) {
        local.fallback_length_stats = st;
    } else if (!local.fallback_length_stats) {
        local.fallback_length_stats = LengthStats{};
    }

    std::vector<UnitPair> out;
    int pi = -1, pj = -1;
    for (size_t a = 0; a <= anchors.size(); a++) {
        const int ni = a < anchors.size() ? anchors[a].first : static_cast<int>(m.rows);
        const int nj = a < anchors.size() ? anchors[a].second : static_cast<int>(m.cols);
        fill_block(m, pi + 1, ni, pj + 1, nj, src_units, tgt_units, src_translated,
                   local, level, out);
        if (a < anchors.size()) {
            out.push_back({level,
                           {ni, ni + 1},
                           {nj, nj + 1},
                           m.at(ni, nj),
                           UnitPair::Method::bleu_anchor});
        }
        pi = ni;
        pj = nj;
    }
    std::sort(out.begin(), out.end(), [](const UnitPair& a, const UnitPair& b) {
        return a.src_span.begin < b.src_span.begin;
    });
    return out;
}

std::vector<UnitPair> align_units(const Units& src_units, const Units& tgt_units,
                                  const translator::Translator& t,
                                  const HierConfig& cfg, UnitPair::Level level) {
    std::vector<UnitPair> out;
    if (src_units.size() == tgt_units.size()) {
        std::optional<Units> translated;
        if (cfg.count_rule_filter) translated = t.translate_batch(src_units);
        for (size_t i = 0; i < src_units.size(); i++) {
            if (cfg.count_rule_filter && !tgt_units[i].empty()) {
                double b =
                    metrics::sentence_bleu((*translated)[i], tgt_units[i], cfg.bleu)
                        .score;
                if (b < cfg.count_rule_filter_min) continue;
            }
            int k = static_cast<int>(i);
            out.push_back(
                {level, {k, k + 1}, {k, k + 1}, 1.0, UnitPair::Method::count_rule});
        }
        return out;
    }
    const Units translated = t.translate_batch(src_units);
    BleuMatrix m;
    m.rows = src_units.size();
    m.cols = tgt_units.size();
    m.scores.assign(m.rows * m.cols, 0.0);
    for (size_t i = 0; i < m.rows; i++)
        for (size_t j = 0; j < m.cols; j++)
            if (!tgt_units[j].empty())
                m.at(i, j) =
                    metrics::sentence_bleu(translated[i], tgt_units[j], cfg.bleu).score;
    auto anchors = find_anchors(m, cfg.theta);
    return fill_gaps(m, anchors, src_units, tgt_units, translated, cfg, level);
}

std::vector<UnitPair> align_paragraphs(const Units& src_paras, const Units& tgt_paras,
                                       const translator::Translator& t,
                                       const HierConfig& cfg) {
    if (src_paras.empty() || tgt_paras.empty())
        throw EmptyDocument("align_paragraphs: a side has zero paragraphs");
    return align_units(src_paras, tgt_paras, t, cfg, UnitPair::Level::paragraph);
}

SentenceAlignment align_sentences(std::string_view src_para, std::string_view tgt_para,
                                  Lang src_lang, Lang tgt_lang,
                                  const translator::Translator& t,
                                  const HierConfig& cfg,
                                  const textnorm::NormTables& tables) {
    SentenceAlignment r;
    r.src_sentences = textnorm::split_sentences(src_para, src_lang, tables);
    r.tgt_sentences = textnorm::split_sentences(tgt_para, tgt_lang, tables);
    if (r.src_sentences.empty() || r.tgt_sentences.empty())
        throw EmptyParagraph("align_sentences: a side has zero sentences");
    Units src, tgt;
    for (const auto& s : r.src_sentences)
        src.push_back(textnorm::tokenize(s, src_lang).tokens);
    for (const auto& s : r.tgt_sentences)
        tgt.push_back(textnorm::tokenize(s, tgt_lang).tokens);
    r.pairs = align_units(src, tgt, t, cfg, UnitPair::Level::sentence);
    return r;
}

}  // namespace bitext::hieralign
