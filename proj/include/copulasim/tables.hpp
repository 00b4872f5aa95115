#ifndef COPULASIM_TABLES_HPP
#define COPULASIM_TABLES_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "copulasim/attributes.hpp"

namespace copulasim {

//! Deal counts per attribute, in the frozen attribute order. Founder counts
//! and geography counts each sum to the population size.
struct MarginalCounts {
    std::array<std::int64_t, kNumAttributes> n{};

    std::int64_t total() const { return n[0] + n[1]; }
    void validate() const;  // throws inconsistent_tables_error
};

//! Ordered cross-deal pair counts pairs(u,v) = #{(i,j): i != j, i has u,
//! j has v}. Symmetric; diagonal is n_u * (n_u - 1).
struct PairCountTable {
    std::array<std::int64_t, kNumAttributes * kNumAttributes> c{};

    std::int64_t& operator()(int u, int v) { return c[u * kNumAttributes + v]; }
    std::int64_t operator()(int u, int v) const { return c[u * kNumAttributes + v]; }
    void validate(const MarginalCounts& m) const;
};

//! Single-deal co-occurrence counts n_{u,v} = #deals carrying both u and v;
//! diagonal equals the marginal count.
struct CooccurrenceMatrix {
    std::array<std::int64_t, kNumAttributes * kNumAttributes> c{};

    std::int64_t& operator()(int u, int v) { return c[u * kNumAttributes + v]; }
    std::int64_t operator()(int u, int v) const { return c[u * kNumAttributes + v]; }
};

/// Inverts the ordered-pair identity pairs(u,v) = n_u n_v - n_{u,v}.
/// Throws inconsistent_tables_error naming the first offending cell when a
/// derived count is negative, exceeds min(n_u, n_v), or a mutual-exclusivity
/// cell (founder x founder, geography x geography) is nonzero.
CooccurrenceMatrix derive_cooccurrence(const MarginalCounts& marginals,
                                       const PairCountTable& pairs);

// Fixture file I/O. Marginals: one 12-label header line plus one integer
// row. Pair counts: header plus 12 rows of "label,12 integers"; symmetry is
// checked on load.
MarginalCounts load_marginals(const std::string& path);
PairCountTable load_pair_counts(const std::string& path);
void save_marginals(const MarginalCounts& m, const std::string& path);
void save_pair_counts(const PairCountTable& t, const std::string& path);

}  // namespace copulasim

#endif
