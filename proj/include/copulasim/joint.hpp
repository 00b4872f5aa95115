#ifndef COPULASIM_JOINT_HPP
#define COPULASIM_JOINT_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "copulasim/outcomes.hpp"
#include "copulasim/pairs.hpp"
#include "copulasim/params.hpp"

namespace copulasim {

//! Symmetric 12x12 table of pairwise joint success probabilities keyed by
//! attribute pair.
struct JointProbTable {
    std::array<double, kNumAttributes * kNumAttributes> t{};

    double& operator()(int u, int v) { return t[u * kNumAttributes + v]; }
    double operator()(int u, int v) const { return t[u * kNumAttributes + v]; }
};

enum class Phi2Mode { Exact, Linear };

/// Mean of x_i * x_j over the sampled pairs (and outcome replications).
double empirical_joint(const PairSample& sample, const OutcomeMatrix& outcomes);

//! Per-deal quantities reused across model_joint evaluations.
struct DealTerms {
    std::vector<AttributeVector> e;
    std::vector<double> t;      // Phi^{-1}(p)
    std::vector<double> cdf_t;  // Phi(t) = p
    std::vector<double> pdf_t;  // phi(t)
};
DealTerms make_deal_terms(const std::vector<Deal>& deals);

/// Mean over pairs of Phi2(t_i, t_j; clamp(r_ij(theta))), where r_ij is the
/// covariance kernel clamped into [-(1-clamp_eps), 1-clamp_eps]. The clamp
/// counter, when given, is incremented once per clamped pair.
double model_joint(const PairSample& sample, const DealTerms& terms, double alpha0,
                   const Matrix12& sigma, Phi2Mode mode, double clamp_eps,
                   std::int64_t* clamp_events = nullptr);

enum class WeightScheme { Uniform, EffectiveSampleSize };

//! Per-cell weights for the 78 unordered attribute pairs: uniform, or the
//! effective sample size min(eligible, K)/K; empty cells get zero.
std::vector<double> cell_weights(const std::vector<PairSample>& samples, int K,
                                 WeightScheme scheme);

/// Weighted sum of squared residuals between empirical and model joint
/// probabilities over the sampled cells.
double objective(const ModelParams& theta, const std::vector<PairSample>& samples,
                 const std::vector<double>& weights, const OutcomeMatrix& outcomes,
                 const DealTerms& terms, Phi2Mode mode, double clamp_eps);

enum class MseCells { Directed, Unique };

/// Mean squared error and its root between two tables, over all 144 directed
/// cells or the 78 unique ones.
std::pair<double, double> fit_metrics(const JointProbTable& empirical,
                                      const JointProbTable& model, MseCells cells);

}  // namespace copulasim

#endif
