#include "copulasim/bvn.hpp"

#include <algorithm>
#include <cmath>

namespace copulasim {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kSqrtTwoPi = 2.50662827463100050242;

// Gauss-Legendre abscissae/weights on [-1,1], halved (symmetric pairs).
constexpr double kX6[] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
constexpr double kW6[] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr double kX12[] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                           0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
constexpr double kW12[] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                           0.2031674267230659, 0.2334925365383547, 0.2491470458134029};
constexpr double kX20[] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                           0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                           0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                           0.07652652113349733};
constexpr double kW20[] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                           0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                           0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                           0.1527533871307259};

double cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Upper orthant probability P(Z1 > h, Z2 > k).
double bvnu(double h, double k, double r) {
    const double ar = std::fabs(r);
    const double* xs;
    const double* ws;
    int np;
    if (ar < 0.3) {
        xs = kX6; ws = kW6; np = 3;
    } else if (ar < 0.75) {
        xs = kX12; ws = kW12; np = 6;
    } else {
        xs = kX20; ws = kW20; np = 10;
    }

    double hk = h * k;
    double bvn = 0.0;
    if (ar < 0.925) {
        if (ar > 0.0) {
            double hs = 0.5 * (h * h + k * k);
            double asr = 0.5 * std::asin(r);
            for (int i = 0; i < np; ++i) {
                for (int s = -1; s <= 1; s += 2) {
                    double sn = std::sin(asr * (s * xs[i] + 1.0));
                    bvn += ws[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
                }
            }
            bvn *= asr / kTwoPi;
        }
        bvn += cdf(-h) * cdf(-k);
    } else {
        if (r < 0.0) {
            k = -k;
            hk = -hk;
        }
        if (ar < 1.0) {
            double as = (1.0 - r) * (1.0 + r);
            double a = std::sqrt(as);
            double bs = (h - k) * (h - k);
            double c = (4.0 - hk) / 8.0;
            double d = (12.0 - hk) / 16.0;
            double asr = -0.5 * (bs / as + hk);
            if (asr > -100.0)
                bvn = a * std::exp(asr) *
                      (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
            if (-hk < 100.0) {
                double b = std::sqrt(bs);
                bvn -= std::exp(-0.5 * hk) * kSqrtTwoPi * cdf(-b / a) * b *
                       (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a *= 0.5;
            for (int i = 0; i < np; ++i) {
                for (int s = -1; s <= 1; s += 2) {
                    double x = a * (s * xs[i] + 1.0);
                    double xss = x * x;
                    double rs = std::sqrt(1.0 - xss);
                    double asr2 = -0.5 * (bs / xss + hk);
                    if (asr2 > -100.0) {
                        bvn += a * ws[i] * std::exp(asr2) *
                               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                                (1.0 + c * xss * (1.0 + d * xss)));
                    }
                }
            }
            bvn = -bvn / kTwoPi;
        }
        if (r > 0.0) {
            bvn += cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) bvn += cdf(k) - cdf(h);
        }
    }
    return bvn;
}

}  // namespace

Probability bvn_cdf(double t1, double t2, LatentCorrelation r) {
    if (!std::isfinite(t1) || !std::isfinite(t2))
        throw std::domain_error("bvn_cdf: non-finite threshold");
    if (t1 < t2) std::swap(t1, t2);  // canonical order makes symmetry bitwise
    double v = bvnu(-t1, -t2, r.value());
    double p1 = cdf(t1);
    double p2 = cdf(t2);
    v = std::min(v, std::min(p1, p2));
    v = std::max(v, std::max(0.0, p1 + p2 - 1.0));
    return Probability(v);
}

Probability bvn_cdf_linear(double t1, double t2, LatentCorrelation r) {
    if (!std::isfinite(t1) || !std::isfinite(t2))
        throw std::domain_error("bvn_cdf_linear: non-finite threshold");
    double v = cdf(t1) * cdf(t2) + r.value() * std_normal_pdf(t1) * std_normal_pdf(t2);
    return Probability(std::clamp(v, 0.0, 1.0));
}

}  // namespace copulasim
