#ifndef COPULASIM_TESTS_ORACLES_HPP
#define COPULASIM_TESTS_ORACLES_HPP

// Independent test oracles. Everything here is deliberately brute-force and
// kept apart from the implementation paths it checks.

#include <cmath>
#include <cstdint>
#include <vector>

#include "copulasim/attributes.hpp"

namespace oracles {

// Poisson-binomial distribution of a sum of independent Bernoulli(p_i):
// exact pmf by dynamic-programming convolution.
inline std::vector<double> poisson_binomial_pmf(const std::vector<double>& p) {
    std::vector<double> dp(p.size() + 1, 0.0);
    dp[0] = 1.0;
    std::size_t used = 0;
    for (double pi : p) {
        ++used;
        for (std::size_t k = used; k >= 1; --k) dp[k] = dp[k] * (1.0 - pi) + dp[k - 1] * pi;
        dp[0] *= 1.0 - pi;
    }
    return dp;
}

struct PoissonBinomialMoments {
    double mean, var, skew;
};

inline PoissonBinomialMoments poisson_binomial_moments(const std::vector<double>& p) {
    double m = 0.0, v = 0.0, c3 = 0.0;
    for (double pi : p) {
        m += pi;
        v += pi * (1.0 - pi);
        c3 += pi * (1.0 - pi) * (1.0 - 2.0 * pi);
    }
    return {m, v, c3 / std::pow(v, 1.5)};
}

inline double poisson_binomial_tail(const std::vector<double>& pmf, std::size_t threshold) {
    double s = 0.0;
    for (std::size_t k = threshold; k < pmf.size(); ++k) s += pmf[k];
    return s;
}

// Brute-force ordered pair counts over a deal population (the integer
// identity pairs(u,v) = n_u n_v - n_{u,v} checked the slow way).
inline std::int64_t brute_force_pairs(const std::vector<copulasim::Deal>& deals, int u, int v) {
    std::vector<copulasim::AttributeVector> e;
    e.reserve(deals.size());
    for (const auto& d : deals) e.push_back(copulasim::encode(d));
    std::int64_t c = 0;
    for (std::size_t i = 0; i < deals.size(); ++i)
        for (std::size_t j = 0; j < deals.size(); ++j)
            if (i != j && e[i].bit(u) && e[j].bit(v)) ++c;
    return c;
}

// Bivariate normal CDF by direct 2-D composite Simpson integration of the
// density over [-12, t1] x [-12, t2]. Slow, independent of the quadrature
// scheme under test; absolute error around 1e-9 at the default grid.
inline double bvn_cdf_quadrature(double t1, double t2, double r, int steps = 400) {
    const double lo = -12.0;
    if (t1 < lo || t2 < lo) return 0.0;
    auto dens = [&](double x, double y) {
        double om = 1.0 - r * r;
        return std::exp(-(x * x - 2.0 * r * x * y + y * y) / (2.0 * om)) /
               (2.0 * M_PI * std::sqrt(om));
    };
    int n = steps % 2 ? steps + 1 : steps;
    double hx = (t1 - lo) / n, hy = (t2 - lo) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        double wx = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        for (int j = 0; j <= n; ++j) {
            double wy = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            s += wx * wy * dens(lo + hx * i, lo + hy * j);
        }
    }
    return s * hx * hy / 9.0;
}

}  // namespace oracles

#endif
