#ifndef COPULASIM_OUTCOMES_HPP
#define COPULASIM_OUTCOMES_HPP

#include <cstdint>
#include <vector>

#include "copulasim/attributes.hpp"
#include "copulasim/params.hpp"

namespace copulasim {

//! Binary outcomes for every deal across one or more independent
//! cross-section replications, deal-major.
//!
//! A single cross-section realization of the latent factor model cannot
//! identify the dependence structure: conditional on the shared factor draw,
//! outcomes are independent with tilted probabilities, so pairwise joint
//! frequencies estimate that one tilt rather than Phi2. Model-generated
//! outcomes therefore carry many replications, each with its own factor
//! draw; empirical joint probabilities average pair products within
//! replications. File-loaded outcomes are the single-replication case.
class OutcomeMatrix {
  public:
    OutcomeMatrix(std::size_t deals, std::size_t replications)
        : deals_(deals), reps_(replications), x_(deals * replications, 0) {}

    std::size_t deal_count() const { return deals_; }
    std::size_t replications() const { return reps_; }

    std::uint8_t get(std::size_t deal, std::size_t rep) const {
        return x_[deal * reps_ + rep];
    }
    void set(std::size_t deal, std::size_t rep, bool v) {
        x_[deal * reps_ + rep] = v ? 1 : 0;
    }
    const std::uint8_t* row(std::size_t deal) const { return x_.data() + deal * reps_; }

    //! Mean of x_i * x_j across replications for one deal pair.
    double pair_mean(std::size_t i, std::size_t j) const;

    //! From deals carrying observed outcomes; throws naming the first deal
    //! id with a missing outcome.
    static OutcomeMatrix from_deals(const std::vector<Deal>& deals);

    //! Correlated cross-sections from the factor model: per replication one
    //! global draw, one factor vector and per-deal noise, thresholded at
    //! t_i = Phi^{-1}(p_i). Deterministic in (seed, replication, deal).
    static OutcomeMatrix generate(const std::vector<Deal>& deals, const ModelParams& params,
                                  std::size_t replications, std::uint64_t seed);

  private:
    std::size_t deals_;
    std::size_t reps_;
    std::vector<std::uint8_t> x_;
};

}  // namespace copulasim

#endif
