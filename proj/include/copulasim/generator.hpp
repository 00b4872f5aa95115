#ifndef COPULASIM_GENERATOR_HPP
#define COPULASIM_GENERATOR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "copulasim/tables.hpp"

namespace copulasim {

//! Extra generator constraints beyond marginals and pairwise co-occurrence.
//! The hot-bucket targets pin the number of deals carrying at least one hot
//! market label per founder type; when absent the hot counts float.
struct GeneratorTargets {
    std::optional<std::int64_t> hot_first;
    std::optional<std::int64_t> hot_repeat;
};

/// Reconstructs a deal population matching the marginal counts and the full
/// pairwise co-occurrence structure exactly (and the hot-bucket targets when
/// given). Label-set structure is resolved by integer construction (pair
/// decomposition with triple repair); geographies by iterative proportional
/// fitting plus integer rounding repair. Deterministic: the seed only
/// shuffles deal order and drives the probability draws, never the counts.
///
/// Deals come back with ids d000001..dN, synthetic probabilities assigned by
/// the additive-nudge rule, and no outcomes.
std::vector<Deal> generate_population(const MarginalCounts& marginals,
                                      const CooccurrenceMatrix& cooc, std::uint64_t seed,
                                      const GeneratorTargets& targets = {});

/// Synthetic success probability: base draw uniform on the founder range
/// (repeat [0.12,0.20], first-time [0.05,0.12]), +0.01 for CA or NY, +0.01
/// when any hot sector applies (once, not per label), capped at 0.20.
Probability assign_probability(const Deal& deal, std::uint64_t seed, std::uint64_t index);

//! One row of the conditional bucket report.
struct BucketRow {
    std::string bucket;
    std::int64_t count_first = 0;
    std::int64_t count_repeat = 0;
    double mean_p_first = 0.0;
    double mean_p_repeat = 0.0;
};

/// Deal counts and mean synthetic probability for the buckets
/// {None, CA/NY, OtherUS/Intl, Hot Sectors, Non-Hot Sectors} split by
/// founder type. A deal is Hot when it carries at least one hot label.
std::vector<BucketRow> bucket_report(const std::vector<Deal>& deals);

//! Recomputed pairwise structure of a population, for verification.
struct PopulationCounts {
    MarginalCounts marginals;
    CooccurrenceMatrix cooc;
    PairCountTable pairs;  // via pairs(u,v) = n_u n_v - n_{u,v}
    std::int64_t hot_first = 0;
    std::int64_t hot_repeat = 0;
};

PopulationCounts count_population(const std::vector<Deal>& deals);

}  // namespace copulasim

#endif
