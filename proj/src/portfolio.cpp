#include "copulasim/portfolio.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "copulasim/generator.hpp"

namespace copulasim {

namespace {

// Largest-remainder quotas of `n` slots over population geography counts,
// expanded to a per-deal geography list in attribute order.
std::vector<Geography> geo_quota_list(int n, const std::vector<Deal>& population) {
    std::array<std::int64_t, 4> counts{};
    for (const Deal& d : population) counts[static_cast<std::size_t>(d.geo)] += 1;
    std::int64_t total = population.size() ? static_cast<std::int64_t>(population.size()) : 1;
    std::array<int, 4> take{};
    std::array<double, 4> rem{};
    int assigned = 0;
    for (int g = 0; g < 4; ++g) {
        double q = static_cast<double>(n) * static_cast<double>(counts[static_cast<std::size_t>(g)]) /
                   static_cast<double>(total);
        take[static_cast<std::size_t>(g)] = static_cast<int>(std::floor(q));
        rem[static_cast<std::size_t>(g)] = q - std::floor(q);
        assigned += take[static_cast<std::size_t>(g)];
    }
    while (assigned < n) {
        int best = 0;
        for (int g = 1; g < 4; ++g)
            if (rem[static_cast<std::size_t>(g)] > rem[static_cast<std::size_t>(best)]) best = g;
        take[static_cast<std::size_t>(best)] += 1;
        rem[static_cast<std::size_t>(best)] = -1.0;
        ++assigned;
    }
    std::vector<Geography> out;
    for (int g = 0; g < 4; ++g)
        for (int i = 0; i < take[static_cast<std::size_t>(g)]; ++i)
            out.push_back(static_cast<Geography>(g));
    return out;
}

int population_repeat_quota(int n, const std::vector<Deal>& population) {
    std::int64_t rep = 0;
    for (const Deal& d : population)
        if (d.founder == FounderType::Repeat) ++rep;
    std::int64_t total = population.size() ? static_cast<std::int64_t>(population.size()) : 1;
    return static_cast<int>(std::llround(static_cast<double>(n) * static_cast<double>(rep) /
                                         static_cast<double>(total)));
}

}  // namespace

Portfolio build_portfolio(const PortfolioSpec& spec, const std::vector<Deal>& population) {
    if (spec.n < 1) throw std::invalid_argument("portfolio size must be positive");
    if (spec.rule == CompositionRule::A_5050GeoDiv && spec.n % 2 != 0)
        throw std::invalid_argument("rule A needs an even portfolio size");
    if (spec.rule == CompositionRule::C_Concentrated && !spec.market)
        throw std::invalid_argument("concentrated rule needs a market");
    bool needs_population = spec.rule == CompositionRule::C_Diversified ||
                            spec.rule == CompositionRule::C_Concentrated;
    if (needs_population && population.empty())
        throw std::invalid_argument("rule C mirrors population frequencies; population is empty");

    Portfolio p;
    p.name = spec.name;
    p.deals.reserve(static_cast<std::size_t>(spec.n));

    std::vector<Geography> geo_list;
    int repeat_quota = 0;
    if (needs_population) {
        geo_list = geo_quota_list(spec.n, population);
        repeat_quota = population_repeat_quota(spec.n, population);
    }

    for (int i = 0; i < spec.n; ++i) {
        Deal d;
        switch (spec.rule) {
            case CompositionRule::A_5050GeoDiv:
                d.founder = i < spec.n / 2 ? FounderType::FirstTime : FounderType::Repeat;
                d.geo = static_cast<Geography>(i % kNumGeographies);
                d.markets.add(static_cast<Market>(i % kNumMarkets));
                break;
            case CompositionRule::B_RepeatCA:
                d.founder = FounderType::Repeat;
                d.geo = Geography::CA;
                d.markets.add(kHotMarkets[static_cast<std::size_t>(i % 3)]);
                break;
            case CompositionRule::C_Diversified:
                d.founder = i < repeat_quota ? FounderType::Repeat : FounderType::FirstTime;
                d.geo = geo_list[static_cast<std::size_t>(i)];
                d.markets.add(static_cast<Market>(i % kNumMarkets));
                break;
            case CompositionRule::C_Concentrated:
                d.founder = i < repeat_quota ? FounderType::Repeat : FounderType::FirstTime;
                d.geo = geo_list[static_cast<std::size_t>(i)];
                d.markets.add(*spec.market);
                break;
        }
        char buf[16];
        std::snprintf(buf, sizeof buf, "p%04d", i + 1);
        d.id = buf;
        d.p = assign_probability(d, spec.seed, static_cast<std::uint64_t>(i));
        p.deals.push_back(std::move(d));
    }
    return p;
}

bool satisfies_rule(const Portfolio& p, const PortfolioSpec& spec) {
    if (static_cast<int>(p.deals.size()) != spec.n) return false;
    switch (spec.rule) {
        case CompositionRule::A_5050GeoDiv: {
            int first = 0;
            std::array<int, 4> geos{};
            for (const Deal& d : p.deals) {
                if (d.founder == FounderType::FirstTime) ++first;
                geos[static_cast<std::size_t>(d.geo)] += 1;
            }
            if (first != spec.n / 2) return false;
            for (int g = 0; g < 4; ++g)
                if (std::abs(geos[static_cast<std::size_t>(g)] - spec.n / 4) > 1) return false;
            return true;
        }
        case CompositionRule::B_RepeatCA:
            for (const Deal& d : p.deals)
                if (d.founder != FounderType::Repeat || d.geo != Geography::CA) return false;
            return true;
        case CompositionRule::C_Diversified: {
            std::array<int, kNumMarkets> m{};
            for (const Deal& d : p.deals)
                for (int k = 0; k < kNumMarkets; ++k)
                    if (d.markets.contains(static_cast<Market>(k))) m[static_cast<std::size_t>(k)] += 1;
            int lo = m[0], hi = m[0];
            for (int k = 1; k < kNumMarkets; ++k) {
                lo = std::min(lo, m[static_cast<std::size_t>(k)]);
                hi = std::max(hi, m[static_cast<std::size_t>(k)]);
            }
            return hi - lo <= 1;
        }
        case CompositionRule::C_Concentrated:
            for (const Deal& d : p.deals)
                if (!spec.market || !d.markets.contains(*spec.market)) return false;
            return true;
    }
    return false;
}

}  // namespace copulasim
