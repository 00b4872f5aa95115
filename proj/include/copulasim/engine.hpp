#ifndef COPULASIM_ENGINE_HPP
#define COPULASIM_ENGINE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "copulasim/params.hpp"
#include "copulasim/portfolio.hpp"

namespace copulasim {

enum class Setting { Independent, Correlated };

std::string setting_label(Setting s);

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    double skew = 0.0;  // NaN when the variance is zero
    double kurt = 0.0;  // Pearson (non-excess); NaN when the variance is zero
};

/// Moments of a sample: mean, std with 1/R normalization, skew m3/m2^1.5 and
/// Pearson kurtosis m4/m2^2. Needs at least 2 samples; zero variance marks
/// skew and kurtosis undefined (NaN).
Moments moments(const std::vector<double>& samples);

//! Success-count distribution of one (portfolio, setting) run. All summary
//! statistics derive from the integer histogram, so results are identical
//! for any worker count.
struct SimulationSummary {
    std::string portfolio;
    Setting setting = Setting::Independent;
    int n = 0;
    std::int64_t replications = 0;
    std::vector<std::int64_t> histogram;  // counts of K = 0..n
    Moments m;
};

/// Monte Carlo success counts. Correlated setting draws, per replication,
/// one global factor, one latent attribute factor vector and per-deal noise
/// (counter streams keyed by replication and deal); Independent draws each
/// outcome as Bernoulli(p_i). Throws infeasible_variance_error before
/// simulating when some deal's variance normalization fails.
SimulationSummary simulate(const Portfolio& portfolio, const ModelParams& params,
                           Setting setting, std::int64_t replications, std::uint64_t seed,
                           int threads = 1);

/// Empirical P(K >= m) per threshold, read off the stored histogram.
std::map<int, double> tail_probabilities(const SimulationSummary& summary,
                                         const std::vector<int>& thresholds);

//! Latent draw matrix for test inspection: Z values for the given
//! replications, laid out replication-major. Uses the same streams as
//! simulate(), so distributional checks see exactly what simulate() saw.
std::vector<double> latent_sample(const Portfolio& portfolio, const ModelParams& params,
                                  std::int64_t replications, std::uint64_t seed);

}  // namespace copulasim

#endif
