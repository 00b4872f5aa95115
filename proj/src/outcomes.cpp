#include "copulasim/outcomes.hpp"

#include <cmath>
#include <stdexcept>

#include "copulasim/errors.hpp"
#include "copulasim/rng.hpp"

namespace copulasim {

double OutcomeMatrix::pair_mean(std::size_t i, std::size_t j) const {
    const std::uint8_t* a = row(i);
    const std::uint8_t* b = row(j);
    std::uint64_t s = 0;
    for (std::size_t r = 0; r < reps_; ++r) s += static_cast<std::uint64_t>(a[r]) * b[r];
    return static_cast<double>(s) / static_cast<double>(reps_);
}

OutcomeMatrix OutcomeMatrix::from_deals(const std::vector<Deal>& deals) {
    OutcomeMatrix m(deals.size(), 1);
    for (std::size_t i = 0; i < deals.size(); ++i) {
        if (!deals[i].outcome)
            throw std::runtime_error("deal '" + deals[i].id + "' has no outcome");
        m.set(i, 0, *deals[i].outcome != 0);
    }
    return m;
}

OutcomeMatrix OutcomeMatrix::generate(const std::vector<Deal>& deals,
                                      const ModelParams& params, std::size_t replications,
                                      std::uint64_t seed) {
    const std::size_t n = deals.size();
    const int rank = params.rank();
    const double a0 = params.alpha0();
    const Matrix12& L = params.factor();

    std::vector<double> loadings(n * static_cast<std::size_t>(rank));
    std::vector<double> phi(n), thresh(n);
    for (std::size_t i = 0; i < n; ++i) {
        AttributeVector e = encode(deals[i]);
        double self = 0.0;
        for (int k = 0; k < rank; ++k) {
            double b = 0.0;
            for (int r : e.active()) b += L(r, k);
            loadings[i * static_cast<std::size_t>(rank) + static_cast<std::size_t>(k)] = b;
            self += b * b;
        }
        double phi2 = 1.0 - a0 * a0 - self;
        if (phi2 <= 0.0)
            throw infeasible_variance_error("deal '" + deals[i].id +
                                            "' has nonpositive idiosyncratic variance");
        phi[i] = std::sqrt(phi2);
        thresh[i] = std_normal_quantile(deals[i].p);
    }

    OutcomeMatrix m(n, replications);
    std::vector<double> p_draw(static_cast<std::size_t>(rank));
    for (std::size_t rep = 0; rep < replications; ++rep) {
        double u = a0 != 0.0 ? rng_normal(seed, Stream::OutcomeGlobal, rep, 0) : 0.0;
        for (int k = 0; k < rank; ++k)
            p_draw[static_cast<std::size_t>(k)] =
                rng_normal(seed, Stream::OutcomeFactor, rep, static_cast<std::uint64_t>(k));
        for (std::size_t i = 0; i < n; ++i) {
            double z = a0 * u;
            const double* b = &loadings[i * static_cast<std::size_t>(rank)];
            for (int k = 0; k < rank; ++k) z += b[static_cast<std::size_t>(k)] * p_draw[static_cast<std::size_t>(k)];
            z += phi[i] * rng_normal(seed, Stream::OutcomeNoise, rep, i);
            m.set(i, rep, z <= thresh[i]);
        }
    }
    return m;
}

}  // namespace copulasim
