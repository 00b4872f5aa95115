#ifndef COPULASIM_PORTFOLIO_HPP
#define COPULASIM_PORTFOLIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copulasim/attributes.hpp"

namespace copulasim {

enum class CompositionRule {
    A_5050GeoDiv,    // 50% first-time / 50% repeat, geographies cycled
    B_RepeatCA,      // all repeat founders in California
    C_Diversified,   // markets cycled, founder/geo mirror the population
    C_Concentrated,  // one market label on every deal
};

struct PortfolioSpec {
    std::string name;
    int n = 40;
    CompositionRule rule = CompositionRule::A_5050GeoDiv;
    std::optional<Market> market;  // required for C_Concentrated
    std::uint64_t seed = 0;
};

struct Portfolio {
    std::string name;
    std::vector<Deal> deals;
};

/// Deterministic portfolio synthesis per composition rule. Market labels are
/// cycled (all six for A and C-diversified, the three hot sectors for B);
/// founder and geography mixes for C rules mirror the population by
/// largest-remainder quotas. Probabilities come from the synthetic rule and
/// stay fixed for the portfolio's lifetime. Rejects odd n for rule A and a
/// missing market for C_Concentrated.
Portfolio build_portfolio(const PortfolioSpec& spec, const std::vector<Deal>& population);

//! Composition predicate for a built portfolio (used by tests and the CLI
//! verification path).
bool satisfies_rule(const Portfolio& p, const PortfolioSpec& spec);

}  // namespace copulasim

#endif
