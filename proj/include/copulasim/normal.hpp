#ifndef COPULASIM_NORMAL_HPP
#define COPULASIM_NORMAL_HPP

#include <stdexcept>

namespace copulasim {

//! A probability value, checked to lie in [0,1] on construction.
class Probability {
  public:
    Probability() : v_(0.0) {}
    explicit Probability(double v);
    double value() const { return v_; }
    operator double() const { return v_; }

  private:
    double v_;
};

//! A latent (Gaussian-scale) correlation, restricted to the open interval
//! (-1, 1). Callers that may produce values at or beyond +-1 must clamp
//! before constructing one.
class LatentCorrelation {
  public:
    LatentCorrelation() : v_(0.0) {}
    explicit LatentCorrelation(double v);
    double value() const { return v_; }
    operator double() const { return v_; }

  private:
    double v_;
};

/// Standard normal CDF. Absolute error well below 1e-12 (erfc based).
Probability std_normal_cdf(double x);

/// Standard normal density exp(-x^2/2)/sqrt(2*pi).
double std_normal_pdf(double x);

/// Inverse of std_normal_cdf on (0,1). Rational initial guess refined by a
/// Halley step, so the CDF/quantile round trip holds to ~1e-14.
double std_normal_quantile(Probability p);

}  // namespace copulasim

#endif
