#include "copulasim/engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "copulasim/errors.hpp"
#include "copulasim/rng.hpp"

namespace copulasim {

namespace {

struct LatentSetup {
    std::vector<double> loadings;  // n x rank
    std::vector<double> phi;
    std::vector<double> thresh;
    std::vector<double> p;
    int rank = 0;
};

LatentSetup prepare(const Portfolio& portfolio, const ModelParams& params) {
    LatentSetup s;
    const std::size_t n = portfolio.deals.size();
    s.rank = params.rank();
    const double a0 = params.alpha0();
    const Matrix12& L = params.factor();
    s.loadings.resize(n * static_cast<std::size_t>(s.rank));
    s.phi.resize(n);
    s.thresh.resize(n);
    s.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Deal& d = portfolio.deals[i];
        AttributeVector e = encode(d);
        double self = 0.0;
        for (int k = 0; k < s.rank; ++k) {
            double b = 0.0;
            for (int r : e.active()) b += L(r, k);
            s.loadings[i * static_cast<std::size_t>(s.rank) + static_cast<std::size_t>(k)] = b;
            self += b * b;
        }
        double phi2 = 1.0 - a0 * a0 - self;
        if (phi2 <= 0.0) {
            std::string attrs;
            for (int a : e.active()) {
                if (!attrs.empty()) attrs += ",";
                attrs += kAttributeLabels[static_cast<std::size_t>(a)];
            }
            throw infeasible_variance_error("portfolio deal '" + d.id +
                                            "' infeasible under the model {" + attrs + "}");
        }
        s.phi[i] = std::sqrt(phi2);
        s.thresh[i] = std_normal_quantile(d.p);
        s.p[i] = d.p.value();
    }
    return s;
}

}  // namespace

std::string setting_label(Setting s) {
    return s == Setting::Independent ? "Independent" : "Correlated";
}

Moments moments(const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("moments: need at least 2 samples");
    const double nr = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= nr;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : samples) {
        double c = v - mean;
        double c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    m2 /= nr;
    m3 /= nr;
    m4 /= nr;
    Moments out;
    out.mean = mean;
    out.stddev = std::sqrt(m2);
    if (m2 > 0.0) {
        out.skew = m3 / std::pow(m2, 1.5);
        out.kurt = m4 / (m2 * m2);
    } else {
        out.skew = std::numeric_limits<double>::quiet_NaN();
        out.kurt = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

namespace {

Moments moments_from_histogram(const std::vector<std::int64_t>& hist, std::int64_t reps) {
    long double mean = 0.0;
    for (std::size_t k = 0; k < hist.size(); ++k)
        mean += static_cast<long double>(hist[k]) * static_cast<long double>(k);
    mean /= static_cast<long double>(reps);
    long double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        if (!hist[k]) continue;
        long double c = static_cast<long double>(k) - mean;
        long double w = static_cast<long double>(hist[k]);
        m2 += w * c * c;
        m3 += w * c * c * c;
        m4 += w * c * c * c * c;
    }
    m2 /= static_cast<long double>(reps);
    m3 /= static_cast<long double>(reps);
    m4 /= static_cast<long double>(reps);
    Moments out;
    out.mean = static_cast<double>(mean);
    out.stddev = static_cast<double>(std::sqrt(m2));
    if (m2 > 0.0L) {
        out.skew = static_cast<double>(m3 / (m2 * std::sqrt(m2)));
        out.kurt = static_cast<double>(m4 / (m2 * m2));
    } else {
        out.skew = std::numeric_limits<double>::quiet_NaN();
        out.kurt = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace

SimulationSummary simulate(const Portfolio& portfolio, const ModelParams& params,
                           Setting setting, std::int64_t replications, std::uint64_t seed,
                           int threads) {
    if (replications < 1) throw std::invalid_argument("simulate: replications must be >= 1");
    const std::size_t n = portfolio.deals.size();
    LatentSetup setup = prepare(portfolio, params);  // validates feasibility in both settings

    SimulationSummary out;
    out.portfolio = portfolio.name;
    out.setting = setting;
    out.n = static_cast<int>(n);
    out.replications = replications;
    out.histogram.assign(n + 1, 0);

    const double a0 = params.alpha0();
    const int rank = setup.rank;

    auto run_range = [&](std::int64_t r0, std::int64_t r1, std::vector<std::int64_t>& hist) {
        std::vector<double> pd(static_cast<std::size_t>(rank));
        for (std::int64_t rep = r0; rep < r1; ++rep) {
            std::size_t k = 0;
            if (setting == Setting::Independent) {
                for (std::size_t i = 0; i < n; ++i) {
                    double u = rng_uniform(seed, Stream::SimIndependent,
                                           static_cast<std::uint64_t>(rep), i);
                    k += u < setup.p[i] ? 1u : 0u;
                }
            } else {
                double u = a0 != 0.0 ? rng_normal(seed, Stream::SimGlobal,
                                                  static_cast<std::uint64_t>(rep), 0)
                                     : 0.0;
                for (int f = 0; f < rank; ++f)
                    pd[static_cast<std::size_t>(f)] =
                        rng_normal(seed, Stream::SimFactor, static_cast<std::uint64_t>(rep),
                                   static_cast<std::uint64_t>(f));
                for (std::size_t i = 0; i < n; ++i) {
                    double z = a0 * u;
                    const double* b = &setup.loadings[i * static_cast<std::size_t>(rank)];
                    for (int f = 0; f < rank; ++f)
                        z += b[static_cast<std::size_t>(f)] * pd[static_cast<std::size_t>(f)];
                    z += setup.phi[i] * rng_normal(seed, Stream::SimNoise,
                                                   static_cast<std::uint64_t>(rep), i);
                    k += z <= setup.thresh[i] ? 1u : 0u;
                }
            }
            hist[k] += 1;
        }
    };

    int nt = std::max(1, threads);
    if (nt == 1 || replications < 1000) {
        run_range(0, replications, out.histogram);
    } else {
        std::vector<std::vector<std::int64_t>> parts(static_cast<std::size_t>(nt),
                                                     std::vector<std::int64_t>(n + 1, 0));
        std::vector<std::thread> pool;
        std::int64_t chunk = (replications + nt - 1) / nt;
        for (int t = 0; t < nt; ++t) {
            std::int64_t b = t * chunk;
            std::int64_t e = std::min(replications, b + chunk);
            if (b < e)
                pool.emplace_back([&, b, e, t] { run_range(b, e, parts[static_cast<std::size_t>(t)]); });
        }
        for (auto& th : pool) th.join();
        for (const auto& part : parts)
            for (std::size_t k = 0; k <= n; ++k) out.histogram[k] += part[k];
    }

    out.m = moments_from_histogram(out.histogram, replications);
    return out;
}

std::map<int, double> tail_probabilities(const SimulationSummary& summary,
                                         const std::vector<int>& thresholds) {
    std::map<int, double> out;
    for (int m : thresholds) {
        if (m < 0) throw std::invalid_argument("tail threshold must be nonnegative");
        std::int64_t c = 0;
        for (std::size_t k = static_cast<std::size_t>(std::min<int>(m, static_cast<int>(summary.histogram.size())));
             k < summary.histogram.size(); ++k)
            c += summary.histogram[k];
        out[m] = static_cast<double>(c) / static_cast<double>(summary.replications);
    }
    return out;
}

std::vector<double> latent_sample(const Portfolio& portfolio, const ModelParams& params,
                                  std::int64_t replications, std::uint64_t seed) {
    LatentSetup setup = prepare(portfolio, params);
    const std::size_t n = portfolio.deals.size();
    const int rank = setup.rank;
    const double a0 = params.alpha0();
    std::vector<double> z(static_cast<std::size_t>(replications) * n);
    std::vector<double> pd(static_cast<std::size_t>(rank));
    for (std::int64_t rep = 0; rep < replications; ++rep) {
        double u = a0 != 0.0 ? rng_normal(seed, Stream::SimGlobal, static_cast<std::uint64_t>(rep), 0)
                             : 0.0;
        for (int f = 0; f < rank; ++f)
            pd[static_cast<std::size_t>(f)] = rng_normal(seed, Stream::SimFactor,
                                                         static_cast<std::uint64_t>(rep),
                                                         static_cast<std::uint64_t>(f));
        for (std::size_t i = 0; i < n; ++i) {
            double zi = a0 * u;
            const double* b = &setup.loadings[i * static_cast<std::size_t>(rank)];
            for (int f = 0; f < rank; ++f)
                zi += b[static_cast<std::size_t>(f)] * pd[static_cast<std::size_t>(f)];
            zi += setup.phi[i] * rng_normal(seed, Stream::SimNoise, static_cast<std::uint64_t>(rep), i);
            z[static_cast<std::size_t>(rep) * n + i] = zi;
        }
    }
    return z;
}

}  // namespace copulasim
