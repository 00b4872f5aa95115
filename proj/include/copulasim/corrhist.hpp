#ifndef COPULASIM_CORRHIST_HPP
#define COPULASIM_CORRHIST_HPP

#include <cstdint>
#include <vector>

#include "copulasim/params.hpp"

namespace copulasim {

struct HistogramBins {
    double lo = -1.0;
    double hi = 1.0;
    std::vector<std::int64_t> counts;

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

//! Latent correlations r_ij and induced Bernoulli correlations for sampled
//! distinct-index deal pairs, with binned views for plotting.
struct CorrelationHistograms {
    std::vector<double> latent;
    std::vector<double> induced;
    HistogramBins latent_bins;
    HistogramBins induced_bins;
    double latent_mean = 0.0, latent_sd = 0.0;
    double induced_mean = 0.0, induced_sd = 0.0;
};

CorrelationHistograms correlation_histograms(const std::vector<Deal>& population,
                                             const ModelParams& params, std::int64_t pairs,
                                             std::uint64_t seed, int bins = 60);

}  // namespace copulasim

#endif
