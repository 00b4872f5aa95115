#ifndef COPULASIM_FIT_HPP
#define COPULASIM_FIT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "copulasim/joint.hpp"

namespace copulasim {

enum class GradientMode { Analytic, FiniteDifference };

struct FitConfig {
    int pairs_per_cell = 5000;
    WeightScheme weights = WeightScheme::Uniform;
    Phi2Mode phi2_mode = Phi2Mode::Exact;
    GradientMode gradient = GradientMode::Analytic;
    int rank = kNumAttributes;
    int max_iters = 5000;
    double tol = 1e-9;         // relative objective improvement over 20 iterations
    double clamp_eps = 0.01;   // kernels clamped into [-(1-eps), 1-eps]
    std::uint64_t seed = 0;
    MseCells mse_cells = MseCells::Directed;
    double penalty_weight = 10.0;  // smooth hinge on the feasibility constraint
    int threads = 1;
};

struct FitReport {
    double alpha0 = 0.0;
    Matrix12 factor;  // L with Sigma = L*L'
    Matrix12 sigma;
    double objective_value = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    JointProbTable empirical;
    JointProbTable model;
    JointProbTable residual;
    int iterations = 0;
    bool converged = false;
    std::int64_t clamp_events = 0;  // clamped kernels in the final model table
    double max_kernel = 0.0;        // max alpha0^2 + e'Sigma e over dataset profiles

    ModelParams params() const { return ModelParams::from_factor(alpha0, factor); }
};

/// Weighted nonlinear least squares of theta = (alpha0, L) against the
/// empirical joint table, by monotone adaptive-step gradient descent on
/// (logit(alpha0), entries of L) with a smooth hinge penalty keeping
/// alpha0^2 + e'Sigma e below 1 - clamp_eps for every dataset profile.
/// Non-convergence within max_iters is reported, not thrown.
FitReport fit(const std::vector<Deal>& deals, const OutcomeMatrix& outcomes,
              const FitConfig& config);

//! Empirical table over all 78 unordered cells, mirrored to 12x12.
JointProbTable build_empirical_table(const std::vector<Deal>& deals,
                                     const OutcomeMatrix& outcomes, int K, std::uint64_t seed);

//! Model-implied table for given parameters over the same sampled cells.
JointProbTable build_model_table(const std::vector<Deal>& deals, const ModelParams& params,
                                 int K, std::uint64_t seed, Phi2Mode mode, double clamp_eps,
                                 std::int64_t* clamp_events = nullptr);

}  // namespace copulasim

#endif
