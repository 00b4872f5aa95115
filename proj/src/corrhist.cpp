#include "copulasim/corrhist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "copulasim/rng.hpp"

namespace copulasim {

namespace {

HistogramBins bin(const std::vector<double>& xs, int nbins) {
    HistogramBins h;
    h.counts.assign(static_cast<std::size_t>(nbins), 0);
    double lo = xs[0], hi = xs[0];
    for (double x : xs) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi <= lo) hi = lo + 1e-12;
    h.lo = lo;
    h.hi = hi;
    for (double x : xs) {
        int b = static_cast<int>((x - lo) / (hi - lo) * nbins);
        b = std::clamp(b, 0, nbins - 1);
        h.counts[static_cast<std::size_t>(b)] += 1;
    }
    return h;
}

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size());
    return {m, std::sqrt(v)};
}

}  // namespace

CorrelationHistograms correlation_histograms(const std::vector<Deal>& population,
                                             const ModelParams& params, std::int64_t pairs,
                                             std::uint64_t seed, int bins) {
    if (pairs < 1) throw std::invalid_argument("correlation_histograms: pairs must be >= 1");
    if (population.size() < 2)
        throw std::invalid_argument("correlation_histograms: need at least 2 deals");

    std::vector<AttributeVector> e;
    e.reserve(population.size());
    for (const Deal& d : population) e.push_back(encode(d));

    CorrelationHistograms out;
    out.latent.reserve(static_cast<std::size_t>(pairs));
    out.induced.reserve(static_cast<std::size_t>(pairs));
    const std::size_t n = population.size();
    std::uint64_t ctr = 0;
    while (out.latent.size() < static_cast<std::size_t>(pairs)) {
        std::size_t i = static_cast<std::size_t>(rng_below(seed, Stream::CorrPairs, ctr++, 0, n));
        std::size_t j = static_cast<std::size_t>(rng_below(seed, Stream::CorrPairs, ctr++, 1, n));
        if (i == j) continue;
        double r = latent_covariance(e[i], e[j], params);
        LatentCorrelation rc(r);
        out.latent.push_back(r);
        out.induced.push_back(
            bernoulli_correlation(population[i].p, population[j].p, rc));
    }
    out.latent_bins = bin(out.latent, bins);
    out.induced_bins = bin(out.induced, bins);
    std::tie(out.latent_mean, out.latent_sd) = mean_sd(out.latent);
    std::tie(out.induced_mean, out.induced_sd) = mean_sd(out.induced);
    return out;
}

}  // namespace copulasim
