#ifndef COPULASIM_BVN_HPP
#define COPULASIM_BVN_HPP

#include "copulasim/normal.hpp"

namespace copulasim {

/// P(Z1 <= t1, Z2 <= t2) for a standard bivariate normal with correlation r.
///
/// Hybrid quadrature of Genz (2004), Statistics and Computing 14, 151-160:
/// Gauss-Legendre on the asin-substituted integrand for |r| < 0.925 and the
/// singularity-split form above, with the node count stepped up in |r|.
/// The result is clamped to the Frechet envelope
///   max(0, Phi(t1)+Phi(t2)-1) <= Phi2 <= min(Phi(t1), Phi(t2)),
/// so those bounds hold exactly. Absolute error is far below 1e-7.
Probability bvn_cdf(double t1, double t2, LatentCorrelation r);

/// First-order expansion of bvn_cdf around r = 0:
///   Phi(t1)*Phi(t2) + r*phi(t1)*phi(t2),
/// clamped to [0,1]; the raw form can leave the unit interval for extreme t.
Probability bvn_cdf_linear(double t1, double t2, LatentCorrelation r);

}  // namespace copulasim

#endif
