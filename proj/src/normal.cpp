#include "copulasim/normal.hpp"

#include <cmath>
#include <string>

namespace copulasim {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

Probability::Probability(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::domain_error("probability outside [0,1]: " + std::to_string(v));
}

LatentCorrelation::LatentCorrelation(double v) : v_(v) {
    if (!(v > -1.0 && v < 1.0))
        throw std::domain_error("latent correlation outside (-1,1): " + std::to_string(v));
}

Probability std_normal_cdf(double x) {
    if (!std::isfinite(x)) throw std::domain_error("std_normal_cdf: non-finite input");
    return Probability(0.5 * std::erfc(-x * kInvSqrt2));
}

double std_normal_pdf(double x) {
    if (!std::isfinite(x)) throw std::domain_error("std_normal_pdf: non-finite input");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

namespace {

// Acklam's rational approximation to the normal quantile (~1e-9 relative),
// used as the starting point for one Halley refinement.
double quantile_guess(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(Probability p) {
    double pv = p.value();
    if (!(pv > 0.0 && pv < 1.0))
        throw std::domain_error("std_normal_quantile: p must lie strictly inside (0,1)");
    // The lower tail is where erfc keeps full relative precision; mirroring
    // also makes the quantile exactly antisymmetric around one half.
    if (pv > 0.5) return -std_normal_quantile(Probability(1.0 - pv));
    double x = quantile_guess(pv);
    // Halley step on f(x) = Phi(x) - p; f' = phi, f'' = -x*phi.
    double e = 0.5 * std::erfc(-x * kInvSqrt2) - pv;
    double u = e / std_normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace copulasim
