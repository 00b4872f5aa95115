#include "copulasim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "copulasim/errors.hpp"
#include "copulasim/rng.hpp"

namespace copulasim {

namespace {

using i64 = std::int64_t;

constexpr int kSaaS = 0, kAI = 1, kFintech = 2;

bool is_hot_market(int k) { return k == kSaaS || k == kAI || k == kFintech; }

int popcount8(std::uint8_t b) { return __builtin_popcount(b); }

// ---- label-set structure for one founder type --------------------------

struct LabelSetCounts {
    // label-set bit pattern -> number of deals
    std::array<i64, 64> count{};
    i64 total() const { return std::accumulate(count.begin(), count.end(), i64{0}); }
};

struct MarketPhaseResult {
    LabelSetCounts first;
    LabelSetCounts repeat;
};

// Remaining pair budget and margins while extracting label sets.
struct PairState {
    std::array<std::array<i64, 6>, 6> pair{};  // symmetric, zero diagonal
    std::array<i64, 6> margin{};

    i64 pair_row_sum(int k) const {
        i64 s = 0;
        for (int l = 0; l < 6; ++l) s += pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
        return s;
    }
    void take_pair(int a, int b, i64 c) {
        pair[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] -= c;
        pair[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] -= c;
    }
};

std::uint8_t set_bits(std::initializer_list<int> ks) {
    std::uint8_t b = 0;
    for (int k : ks) b |= static_cast<std::uint8_t>(1u << k);
    return b;
}

// Deficiency of label k: pair incidences still to place minus deals still
// available to carry k. Positive means k needs triple-label deals.
i64 deficiency(const PairState& st, int k) { return st.pair_row_sum(k) - st.margin[static_cast<std::size_t>(k)]; }

void add_triples(PairState& st, LabelSetCounts& out, int a, int b, int c, i64 n) {
    st.take_pair(a, b, n);
    st.take_pair(a, c, n);
    st.take_pair(b, c, n);
    st.margin[static_cast<std::size_t>(a)] -= n;
    st.margin[static_cast<std::size_t>(b)] -= n;
    st.margin[static_cast<std::size_t>(c)] -= n;
    out.count[set_bits({a, b, c})] += n;
}

// Resolves positive deficiencies by emitting triple-label deals. `forbid`
// is a label-set topology that must not be created (the all-hot triple when
// a hot-bucket target has already fixed its count).
void repair_deficiencies(PairState& st, LabelSetCounts& out, std::uint8_t forbid,
                         const std::string& founder_name) {
    for (int guard = 0; guard < 4096; ++guard) {
        int k = -1;
        i64 dk = 0;
        for (int i = 0; i < 6; ++i) {
            i64 d = deficiency(st, i);
            if (d > dk) {
                dk = d;
                k = i;
            }
        }
        if (k < 0) return;
        // best partner pair by capacity, preferring slack partners
        int bl = -1, bm = -1;
        i64 bcap = 0;
        i64 bslack = 0;
        for (int l = 0; l < 6; ++l) {
            for (int m = l + 1; m < 6; ++m) {
                if (l == k || m == k) continue;
                std::uint8_t tri = set_bits({k, l, m});
                if (tri == forbid) continue;
                i64 cap = std::min({st.pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)],
                                    st.pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)],
                                    st.pair[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)]});
                if (cap <= 0) continue;
                i64 slack = -std::max<i64>(deficiency(st, l), 0) - std::max<i64>(deficiency(st, m), 0);
                if (cap > bcap || (cap == bcap && slack > bslack)) {
                    bcap = cap;
                    bslack = slack;
                    bl = l;
                    bm = m;
                }
            }
        }
        if (bl < 0)
            throw infeasible_population_error(
                "no triple-label repair available for " + founder_name + " market " +
                market_label(static_cast<Market>(k)) + " (deficiency " + std::to_string(dk) + ")");
        add_triples(st, out, k, bl, bm, std::min(dk, bcap));
    }
    throw infeasible_population_error("market structure repair did not terminate");
}

// After triples, the remaining pair budget becomes two-label deals and the
// remaining margins single-label deals.
void flush_doubles_and_singles(PairState& st, LabelSetCounts& out, i64 founder_total,
                               const std::string& founder_name) {
    for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b) {
            i64 c = st.pair[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            if (c == 0) continue;
            out.count[set_bits({a, b})] += c;
            st.take_pair(a, b, c);
            st.margin[static_cast<std::size_t>(a)] -= c;
            st.margin[static_cast<std::size_t>(b)] -= c;
        }
    }
    for (int k = 0; k < 6; ++k) {
        if (st.margin[static_cast<std::size_t>(k)] < 0)
            throw infeasible_population_error(founder_name + " market margin for " +
                                              market_label(static_cast<Market>(k)) +
                                              " overdrawn by pair structure");
        out.count[set_bits({k})] += st.margin[static_cast<std::size_t>(k)];
        st.margin[static_cast<std::size_t>(k)] = 0;
    }
    i64 labeled = out.total() - out.count[0];
    if (labeled > founder_total)
        throw infeasible_population_error(founder_name + " label structure needs " +
                                          std::to_string(labeled) + " deals but only " +
                                          std::to_string(founder_total) + " exist");
    out.count[0] += founder_total - labeled;
}

// Splits the market-pair budget between founder types and decomposes each
// side into label-set counts. The repeat side takes {SaaS, AI} doubles for
// its hot-bucket excess and balanced non-hot doubles for the rest, which
// keeps repeat deals at no more than two labels.
MarketPhaseResult solve_market_phase(const MarginalCounts& marginals,
                                     const CooccurrenceMatrix& cooc,
                                     const GeneratorTargets& targets) {
    std::array<i64, 6> fm_first{}, fm_rep{};
    PairState total;
    for (int k = 0; k < 6; ++k) {
        fm_first[static_cast<std::size_t>(k)] = cooc(0, 6 + k);
        fm_rep[static_cast<std::size_t>(k)] = cooc(1, 6 + k);
        for (int l = 0; l < 6; ++l)
            if (k != l) total.pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = cooc(6 + k, 6 + l);
    }

    MarketPhaseResult res;

    // --- repeat founder ---
    PairState rep;
    rep.margin = fm_rep;
    i64 hot_margin_rep = fm_rep[kSaaS] + fm_rep[kAI] + fm_rep[kFintech];
    i64 rep_hot_doubles = 0;
    if (targets.hot_repeat) {
        i64 need = hot_margin_rep - *targets.hot_repeat;
        if (need < 0)
            throw infeasible_population_error(
                "repeat hot-bucket target exceeds the sum of repeat hot-market counts");
        // consume need as hot-pair co-occurrences, {SaaS,AI} first
        static constexpr std::array<std::pair<int, int>, 3> hot_pairs = {
            {{kSaaS, kAI}, {kSaaS, kFintech}, {kAI, kFintech}}};
        for (auto [a, b] : hot_pairs) {
            if (need == 0) break;
            i64 c = std::min({need, total.pair[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                              rep.margin[static_cast<std::size_t>(a)], rep.margin[static_cast<std::size_t>(b)]});
            if (c <= 0) continue;
            res.repeat.count[set_bits({a, b})] += c;
            total.take_pair(a, b, c);
            rep.margin[static_cast<std::size_t>(a)] -= c;
            rep.margin[static_cast<std::size_t>(b)] -= c;
            rep_hot_doubles += c;
            need -= c;
        }
        if (need != 0)
            throw infeasible_population_error(
                "cannot realize the repeat hot-bucket target from the pair budget");
    }
    // extra doubles so singles+doubles+empty fit in the repeat deal count
    i64 rep_inc = std::accumulate(rep.margin.begin(), rep.margin.end(), i64{0});
    i64 d_extra = std::max<i64>(0, rep_inc + rep_hot_doubles - marginals.n[1]);
    i64 dd = d_extra;
    int guard = 0;
    while (dd > 0) {
        if (++guard > 100000)
            throw infeasible_population_error("repeat double selection did not terminate");
        std::array<int, 6> order{0, 1, 2, 3, 4, 5};
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            if (rep.margin[static_cast<std::size_t>(x)] != rep.margin[static_cast<std::size_t>(y)])
                return rep.margin[static_cast<std::size_t>(x)] > rep.margin[static_cast<std::size_t>(y)];
            return x < y;
        });
        int a = order[0];
        int b = -1;
        for (int i = 1; i < 6; ++i) {
            int cand = order[static_cast<std::size_t>(i)];
            if (rep.margin[static_cast<std::size_t>(cand)] <= 0) continue;
            if (is_hot_market(a) && is_hot_market(cand)) continue;  // hot pairs are pinned above
            if (total.pair[static_cast<std::size_t>(a)][static_cast<std::size_t>(cand)] <= 0) continue;
            b = cand;
            break;
        }
        if (rep.margin[static_cast<std::size_t>(a)] <= 0 || b < 0)
            throw infeasible_population_error(
                "repeat founder needs more two-label deals than the pair budget allows");
        i64 c = std::min({dd, rep.margin[static_cast<std::size_t>(a)], rep.margin[static_cast<std::size_t>(b)],
                          total.pair[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                          std::max<i64>(1, rep.margin[static_cast<std::size_t>(a)] -
                                               rep.margin[static_cast<std::size_t>(b)])});
        res.repeat.count[set_bits({a, b})] += c;
        total.take_pair(a, b, c);
        rep.margin[static_cast<std::size_t>(a)] -= c;
        rep.margin[static_cast<std::size_t>(b)] -= c;
        dd -= c;
    }
    for (int k = 0; k < 6; ++k) res.repeat.count[set_bits({k})] += rep.margin[static_cast<std::size_t>(k)];
    i64 rep_labeled = res.repeat.total();
    if (rep_labeled > marginals.n[1])
        throw infeasible_population_error("repeat label structure exceeds the repeat deal count");
    res.repeat.count[0] += marginals.n[1] - rep_labeled;

    // --- first-time founder: remaining budget ---
    PairState first = total;
    first.margin = fm_first;
    std::uint8_t hot_triple = set_bits({kSaaS, kAI, kFintech});
    if (targets.hot_first) {
        i64 first_hot_pairs = first.pair[kSaaS][kAI] + first.pair[kSaaS][kFintech] +
                              first.pair[kAI][kFintech];
        i64 hot_margin_first = fm_first[kSaaS] + fm_first[kAI] + fm_first[kFintech];
        i64 saf = first_hot_pairs - (hot_margin_first - *targets.hot_first);
        if (saf < 0 || saf > std::min({first.pair[kSaaS][kAI], first.pair[kSaaS][kFintech],
                                       first.pair[kAI][kFintech]}))
            throw infeasible_population_error(
                "first-time hot-bucket target is inconsistent with the hot pair counts "
                "(needs " + std::to_string(saf) + " three-hot-label deals)");
        add_triples(first, res.first, kSaaS, kAI, kFintech, saf);
        repair_deficiencies(first, res.first, hot_triple, "first-time");
    } else {
        repair_deficiencies(first, res.first, 0, "first-time");
    }
    flush_doubles_and_singles(first, res.first, marginals.n[0], "first-time");
    return res;
}

// ---- geography phase ----------------------------------------------------

struct GeoClass {
    int founder;        // 0 first, 1 repeat
    std::uint8_t bits;  // market label set
    i64 count;
    std::array<i64, 4> geo{};  // resulting allocation
};

// True when the class must stay out of California: repeat-founder deals with
// two or more market labels would otherwise push the latent variance
// normalization against its feasibility bound under strong dependence fits.
bool ca_blocked(const GeoClass& c) { return c.founder == 1 && popcount8(c.bits) >= 2; }

void solve_geo_phase(std::vector<GeoClass>& classes, const CooccurrenceMatrix& cooc) {
    std::array<std::array<i64, 6>, 4> Q{};  // geography x market targets
    std::array<std::array<i64, 4>, 2> fgd{};
    for (int g = 0; g < 4; ++g)
        for (int k = 0; k < 6; ++k) Q[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] = cooc(2 + g, 6 + k);
    for (int f = 0; f < 2; ++f)
        for (int g = 0; g < 4; ++g) fgd[static_cast<std::size_t>(f)][static_cast<std::size_t>(g)] = cooc(f, 2 + g);

    // the CA rule is only applied when the non-CA repeat capacity can host
    // every multi-label repeat deal
    i64 rep_multi = 0;
    for (const auto& c : classes)
        if (c.founder == 1 && popcount8(c.bits) >= 2) rep_multi += c.count;
    i64 rep_non_ca = fgd[1][1] + fgd[1][2] + fgd[1][3];
    bool use_ca_rule = rep_multi <= rep_non_ca;

    const std::size_t C = classes.size();
    std::vector<std::array<double, 4>> x(C);

    auto blocked = [&](std::size_t i, int g) {
        return use_ca_rule && g == 0 && ca_blocked(classes[i]);
    };

    // start proportional to founder geography shares
    for (std::size_t i = 0; i < C; ++i) {
        const auto& c = classes[i];
        double tot = 0;
        for (int g = 0; g < 4; ++g) {
            x[i][static_cast<std::size_t>(g)] =
                blocked(i, g) ? 0.0
                              : static_cast<double>(fgd[static_cast<std::size_t>(c.founder)][static_cast<std::size_t>(g)]);
            tot += x[i][static_cast<std::size_t>(g)];
        }
        if (tot <= 0) {
            for (int g = 0; g < 4; ++g) x[i][static_cast<std::size_t>(g)] = blocked(i, g) ? 0.0 : 1.0;
            tot = 0;
            for (int g = 0; g < 4; ++g) tot += x[i][static_cast<std::size_t>(g)];
        }
        for (int g = 0; g < 4; ++g)
            x[i][static_cast<std::size_t>(g)] *= static_cast<double>(c.count) / tot;
    }

    // iterative proportional fitting over the three constraint families
    for (int it = 0; it < 600; ++it) {
        for (std::size_t i = 0; i < C; ++i) {
            double t = 0;
            for (int g = 0; g < 4; ++g) t += x[i][static_cast<std::size_t>(g)];
            if (t > 0)
                for (int g = 0; g < 4; ++g)
                    x[i][static_cast<std::size_t>(g)] *= static_cast<double>(classes[i].count) / t;
        }
        for (int f = 0; f < 2; ++f) {
            for (int g = 0; g < 4; ++g) {
                double t = 0;
                for (std::size_t i = 0; i < C; ++i)
                    if (classes[i].founder == f) t += x[i][static_cast<std::size_t>(g)];
                if (t > 0) {
                    double s = static_cast<double>(fgd[static_cast<std::size_t>(f)][static_cast<std::size_t>(g)]) / t;
                    for (std::size_t i = 0; i < C; ++i)
                        if (classes[i].founder == f) x[i][static_cast<std::size_t>(g)] *= s;
                }
            }
        }
        for (int g = 0; g < 4; ++g) {
            for (int k = 0; k < 6; ++k) {
                double t = 0;
                for (std::size_t i = 0; i < C; ++i)
                    if (classes[i].bits & (1u << k)) t += x[i][static_cast<std::size_t>(g)];
                if (t > 0) {
                    double s = static_cast<double>(Q[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)]) / t;
                    for (std::size_t i = 0; i < C; ++i)
                        if (classes[i].bits & (1u << k)) x[i][static_cast<std::size_t>(g)] *= s;
                }
            }
        }
    }

    // integer rounding with exact class totals
    for (std::size_t i = 0; i < C; ++i) {
        auto& c = classes[i];
        double t = 0;
        for (int g = 0; g < 4; ++g) t += x[i][static_cast<std::size_t>(g)];
        std::array<double, 4> xi{};
        for (int g = 0; g < 4; ++g)
            xi[static_cast<std::size_t>(g)] =
                t > 0 ? x[i][static_cast<std::size_t>(g)] * static_cast<double>(c.count) / t
                      : static_cast<double>(c.count) / 4.0;
        std::array<double, 4> rem{};
        i64 assigned = 0;
        for (int g = 0; g < 4; ++g) {
            c.geo[static_cast<std::size_t>(g)] = static_cast<i64>(std::floor(xi[static_cast<std::size_t>(g)]));
            rem[static_cast<std::size_t>(g)] = xi[static_cast<std::size_t>(g)] - static_cast<double>(c.geo[static_cast<std::size_t>(g)]);
            assigned += c.geo[static_cast<std::size_t>(g)];
        }
        while (assigned < c.count) {
            int best = -1;
            for (int g = 0; g < 4; ++g) {
                if (blocked(i, g)) continue;
                if (best < 0 || rem[static_cast<std::size_t>(g)] > rem[static_cast<std::size_t>(best)]) best = g;
            }
            c.geo[static_cast<std::size_t>(best)] += 1;
            rem[static_cast<std::size_t>(best)] = -1.0;
            ++assigned;
        }
    }

    // deviations
    std::array<std::array<i64, 4>, 2> dfg{};
    std::array<std::array<i64, 6>, 4> dgk{};
    for (std::size_t i = 0; i < C; ++i)
        for (int g = 0; g < 4; ++g) {
            dfg[static_cast<std::size_t>(classes[i].founder)][static_cast<std::size_t>(g)] += classes[i].geo[static_cast<std::size_t>(g)];
            for (int k = 0; k < 6; ++k)
                if (classes[i].bits & (1u << k)) dgk[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] += classes[i].geo[static_cast<std::size_t>(g)];
        }
    for (int f = 0; f < 2; ++f)
        for (int g = 0; g < 4; ++g) dfg[static_cast<std::size_t>(f)][static_cast<std::size_t>(g)] -= fgd[static_cast<std::size_t>(f)][static_cast<std::size_t>(g)];
    for (int g = 0; g < 4; ++g)
        for (int k = 0; k < 6; ++k) dgk[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] -= Q[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)];

    auto l1 = [&]() {
        i64 s = 0;
        for (int f = 0; f < 2; ++f)
            for (int g = 0; g < 4; ++g) s += std::llabs(dfg[static_cast<std::size_t>(f)][static_cast<std::size_t>(g)]);
        for (int g = 0; g < 4; ++g)
            for (int k = 0; k < 6; ++k) s += std::llabs(dgk[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)]);
        return s;
    };

    auto move_delta = [&](std::size_t i, int g1, int g2) {
        int f = classes[i].founder;
        i64 d = 0;
        d += std::llabs(dfg[static_cast<std::size_t>(f)][static_cast<std::size_t>(g1)] - 1) - std::llabs(dfg[static_cast<std::size_t>(f)][static_cast<std::size_t>(g1)]);
        d += std::llabs(dfg[static_cast<std::size_t>(f)][static_cast<std::size_t>(g2)] + 1) - std::llabs(dfg[static_cast<std::size_t>(f)][static_cast<std::size_t>(g2)]);
        for (int k = 0; k < 6; ++k)
            if (classes[i].bits & (1u << k)) {
                d += std::llabs(dgk[static_cast<std::size_t>(g1)][static_cast<std::size_t>(k)] - 1) - std::llabs(dgk[static_cast<std::size_t>(g1)][static_cast<std::size_t>(k)]);
                d += std::llabs(dgk[static_cast<std::size_t>(g2)][static_cast<std::size_t>(k)] + 1) - std::llabs(dgk[static_cast<std::size_t>(g2)][static_cast<std::size_t>(k)]);
            }
        return d;
    };
    auto apply_move = [&](std::size_t i, int g1, int g2) {
        int f = classes[i].founder;
        classes[i].geo[static_cast<std::size_t>(g1)] -= 1;
        classes[i].geo[static_cast<std::size_t>(g2)] += 1;
        dfg[static_cast<std::size_t>(f)][static_cast<std::size_t>(g1)] -= 1;
        dfg[static_cast<std::size_t>(f)][static_cast<std::size_t>(g2)] += 1;
        for (int k = 0; k < 6; ++k)
            if (classes[i].bits & (1u << k)) {
                dgk[static_cast<std::size_t>(g1)][static_cast<std::size_t>(k)] -= 1;
                dgk[static_cast<std::size_t>(g2)][static_cast<std::size_t>(k)] += 1;
            }
    };

    i64 dev = l1();
    int guard = 0;
    while (dev > 0) {
        if (++guard > 500000)
            throw infeasible_population_error("geography repair did not terminate");
        bool applied = false;
        for (std::size_t i = 0; i < C && !applied; ++i) {
            for (int g1 = 0; g1 < 4 && !applied; ++g1) {
                if (classes[i].geo[static_cast<std::size_t>(g1)] <= 0) continue;
                for (int g2 = 0; g2 < 4; ++g2) {
                    if (g2 == g1 || blocked(i, g2)) continue;
                    i64 d = move_delta(i, g1, g2);
                    if (d < 0) {
                        apply_move(i, g1, g2);
                        dev += d;
                        applied = true;
                        break;
                    }
                }
            }
        }
        if (applied) continue;
        // paired swaps within one founder keep founder-geo totals intact
        bool found = false;
        for (std::size_t i = 0; i < C && !found; ++i) {
            for (std::size_t j = 0; j < C && !found; ++j) {
                if (i == j || classes[i].founder != classes[j].founder) continue;
                for (int g1 = 0; g1 < 4 && !found; ++g1) {
                    if (classes[i].geo[static_cast<std::size_t>(g1)] <= 0) continue;
                    if (blocked(j, g1)) continue;
                    for (int g2 = 0; g2 < 4; ++g2) {
                        if (g2 == g1 || classes[j].geo[static_cast<std::size_t>(g2)] <= 0 || blocked(i, g2)) continue;
                        i64 d = move_delta(i, g1, g2);
                        apply_move(i, g1, g2);
                        i64 d2 = move_delta(j, g2, g1);
                        if (d + d2 < 0) {
                            apply_move(j, g2, g1);
                            dev += d + d2;
                            found = true;
                            break;
                        }
                        apply_move(i, g2, g1);  // undo
                    }
                }
            }
        }
        if (!found) {
            std::ostringstream os;
            os << "geography assignment stuck; residual cells:";
            for (int g = 0; g < 4; ++g)
                for (int k = 0; k < 6; ++k)
                    if (dgk[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] != 0)
                        os << " " << geography_label(static_cast<Geography>(g)) << "x"
                           << market_label(static_cast<Market>(k)) << "="
                           << dgk[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)];
            throw infeasible_population_error(os.str());
        }
    }
}

}  // namespace

Probability assign_probability(const Deal& deal, std::uint64_t seed, std::uint64_t index) {
    double u = rng_uniform(seed, Stream::ProbAssign, index, 0);
    double p = deal.founder == FounderType::Repeat ? 0.12 + 0.08 * u : 0.05 + 0.07 * u;
    if (deal.geo == Geography::CA || deal.geo == Geography::NY) p += 0.01;
    if (deal.markets.any_hot()) p += 0.01;
    return Probability(std::min(p, 0.20));
}

std::vector<Deal> generate_population(const MarginalCounts& marginals,
                                      const CooccurrenceMatrix& cooc, std::uint64_t seed,
                                      const GeneratorTargets& targets) {
    marginals.validate();
    MarketPhaseResult mk = solve_market_phase(marginals, cooc, targets);

    std::vector<GeoClass> classes;
    for (int f = 0; f < 2; ++f) {
        const LabelSetCounts& ls = f == 0 ? mk.first : mk.repeat;
        for (int bits = 0; bits < 64; ++bits)
            if (ls.count[static_cast<std::size_t>(bits)] > 0)
                classes.push_back({f, static_cast<std::uint8_t>(bits),
                                   ls.count[static_cast<std::size_t>(bits)],
                                   {}});
    }
    solve_geo_phase(classes, cooc);

    std::vector<Deal> deals;
    deals.reserve(static_cast<std::size_t>(marginals.total()));
    for (const auto& c : classes) {
        for (int g = 0; g < 4; ++g) {
            for (i64 r = 0; r < c.geo[static_cast<std::size_t>(g)]; ++r) {
                Deal d;
                d.founder = c.founder == 0 ? FounderType::FirstTime : FounderType::Repeat;
                d.geo = static_cast<Geography>(g);
                d.markets = MarketSet::from_bits(c.bits);
                deals.push_back(std::move(d));
            }
        }
    }

    // seeded arrangement shuffle, then ids and probabilities
    for (std::size_t i = deals.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng_below(seed, Stream::Arrange, i, 0, i));
        std::swap(deals[i - 1], deals[j]);
    }
    for (std::size_t i = 0; i < deals.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "d%06zu", i + 1);
        deals[i].id = buf;
        deals[i].p = assign_probability(deals[i], seed, i);
    }

    // exactness gate: the construction must reproduce every target count
    PopulationCounts chk = count_population(deals);
    for (int u = 0; u < kNumAttributes; ++u) {
        for (int v = 0; v < kNumAttributes; ++v) {
            i64 want = (u == v) ? marginals.n[u] : cooc(u, v);
            if (chk.cooc(u, v) != want) {
                std::ostringstream os;
                os << "generated population misses target at "
                   << kAttributeLabels[static_cast<std::size_t>(u)] << "x"
                   << kAttributeLabels[static_cast<std::size_t>(v)] << ": got " << chk.cooc(u, v)
                   << ", want " << want;
                throw infeasible_population_error(os.str());
            }
        }
    }
    if (targets.hot_first && chk.hot_first != *targets.hot_first)
        throw infeasible_population_error("hot-bucket count (first-time) missed: got " +
                                          std::to_string(chk.hot_first));
    if (targets.hot_repeat && chk.hot_repeat != *targets.hot_repeat)
        throw infeasible_population_error("hot-bucket count (repeat) missed: got " +
                                          std::to_string(chk.hot_repeat));
    return deals;
}

std::vector<BucketRow> bucket_report(const std::vector<Deal>& deals) {
    // bucket index: 0 None, 1 CA/NY, 2 OtherUS/Intl, 3 Hot, 4 Non-Hot
    static const std::array<std::string, 5> names = {"None", "CA / NY", "Other US / Intl",
                                                     "Hot Sectors", "Non-Hot Sectors"};
    std::array<std::array<i64, 2>, 5> cnt{};
    std::array<std::array<double, 2>, 5> sum{};
    for (const Deal& d : deals) {
        std::size_t f = d.founder == FounderType::Repeat ? 1u : 0u;
        auto tally = [&](std::size_t b) {
            cnt[b][f] += 1;
            sum[b][f] += d.p.value();
        };
        tally(0);
        if (d.geo == Geography::CA || d.geo == Geography::NY)
            tally(1);
        else
            tally(2);
        tally(d.markets.any_hot() ? 3 : 4);
    }
    std::vector<BucketRow> rows;
    for (std::size_t b = 0; b < 5; ++b) {
        BucketRow r;
        r.bucket = names[b];
        r.count_first = cnt[b][0];
        r.count_repeat = cnt[b][1];
        r.mean_p_first = cnt[b][0] ? sum[b][0] / static_cast<double>(cnt[b][0]) : 0.0;
        r.mean_p_repeat = cnt[b][1] ? sum[b][1] / static_cast<double>(cnt[b][1]) : 0.0;
        rows.push_back(std::move(r));
    }
    return rows;
}

PopulationCounts count_population(const std::vector<Deal>& deals) {
    PopulationCounts pc;
    for (const Deal& d : deals) {
        AttributeVector e = encode(d);
        for (int u = 0; u < kNumAttributes; ++u) {
            if (!e.bit(u)) continue;
            pc.marginals.n[u] += 1;
            for (int v = 0; v < kNumAttributes; ++v)
                if (e.bit(v)) pc.cooc(u, v) += 1;
        }
        if (d.markets.any_hot()) {
            if (d.founder == FounderType::FirstTime)
                pc.hot_first += 1;
            else
                pc.hot_repeat += 1;
        }
    }
    for (int u = 0; u < kNumAttributes; ++u)
        for (int v = 0; v < kNumAttributes; ++v)
            pc.pairs(u, v) = u == v ? pc.marginals.n[u] * (pc.marginals.n[u] - 1)
                                    : pc.marginals.n[u] * pc.marginals.n[v] - pc.cooc(u, v);
    return pc;
}

}  // namespace copulasim
