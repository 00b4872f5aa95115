#ifndef COPULASIM_PAIRS_HPP
#define COPULASIM_PAIRS_HPP

#include <cstdint>
#include <vector>

#include "copulasim/attributes.hpp"

namespace copulasim {

//! Ordered deal-index pairs sampled for one attribute cell (u,v): deal i
//! carries u, deal j carries v, i != j.
struct PairSample {
    int u = 0;
    int v = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::int64_t eligible = 0;  // n_u * n_v - n_{u,v} ordered pairs available
};

class empty_cell_error : public std::runtime_error {
  public:
    empty_cell_error(int u, int v)
        : std::runtime_error("no eligible deal pair for cell " +
                             kAttributeLabels[static_cast<std::size_t>(u)] + "x" +
                             kAttributeLabels[static_cast<std::size_t>(v)]),
          u_(u),
          v_(v) {}
    int u() const { return u_; }
    int v() const { return v_; }

  private:
    int u_, v_;
};

/// Draws K ordered pairs uniformly with replacement from the eligible set
/// (so K may exceed it). Deterministic given (seed, u, v).
PairSample sample_pairs(const std::vector<Deal>& deals, int u, int v, int K,
                        std::uint64_t seed);

}  // namespace copulasim

#endif
