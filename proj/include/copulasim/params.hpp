#ifndef COPULASIM_PARAMS_HPP
#define COPULASIM_PARAMS_HPP

#include <array>
#include <string>
#include <vector>

#include "copulasim/attributes.hpp"
#include "copulasim/bvn.hpp"

namespace copulasim {

//! Dense 12x12 matrix in the frozen attribute order, row-major.
class Matrix12 {
  public:
    Matrix12() : a_{} {}

    double& operator()(int r, int c) { return a_[r * kNumAttributes + c]; }
    double operator()(int r, int c) const { return a_[r * kNumAttributes + c]; }
    const std::array<double, kNumAttributes * kNumAttributes>& data() const { return a_; }
    std::array<double, kNumAttributes * kNumAttributes>& data() { return a_; }

    bool is_symmetric(double tol = 0.0) const;
    Matrix12 transpose() const;

    static Matrix12 identity();

  private:
    std::array<double, kNumAttributes * kNumAttributes> a_;
};

//! e_i' * M * e_j over indicator vectors (sum of M over the active index grid).
double quad_form(const AttributeVector& ei, const Matrix12& m, const AttributeVector& ej);

//! Symmetric eigendecomposition (cyclic Jacobi). Returns eigenvalues
//! ascending; `vectors` columns are the matching eigenvectors.
void symmetric_eigen(const Matrix12& m, std::array<double, kNumAttributes>& values,
                     Matrix12& vectors);

// Attribute-group partition of Sigma: F = founder rows 0..1, G = geography
// rows 2..5, M = market rows 6..11.
enum class Block { FF, FG, FM, GF, GG, GM, MF, MG, MM };

struct BlockView {
    int row_begin, row_end;  // half-open
    int col_begin, col_end;
};

BlockView block_view(Block b);

//! Model parameters theta = (alpha0, L) with Sigma = L*L' available both as
//! the exact matrix it was built from and as the factor used for sampling.
class ModelParams {
  public:
    //! From a factor matrix: Sigma is derived as L*L' exactly.
    static ModelParams from_factor(double alpha0, const Matrix12& L, int rank = kNumAttributes);

    //! From a covariance table (e.g. a published fixture). Negative
    //! eigenvalues introduced by table rounding are clipped to zero to
    //! obtain the sampling factor; `sigma()` still returns the table as
    //! given. `psd_adjustment()` reports the largest entrywise change.
    static ModelParams from_covariance(double alpha0, const Matrix12& sigma);

    double alpha0() const { return alpha0_; }
    const Matrix12& sigma() const { return sigma_; }
    const Matrix12& factor() const { return factor_; }
    int rank() const { return rank_; }
    double psd_adjustment() const { return psd_adjustment_; }

  private:
    double alpha0_ = 0.0;
    Matrix12 sigma_;
    Matrix12 factor_;
    int rank_ = kNumAttributes;
    double psd_adjustment_ = 0.0;
};

/// Latent covariance kernel alpha0^2 + e_i' Sigma e_j (Cov(Z_i, Z_j)).
double latent_covariance(const AttributeVector& ei, const AttributeVector& ej,
                         const ModelParams& params);

/// Idiosyncratic variance phi_i^2 = 1 - alpha0^2 - e' Sigma e, in (0,1].
/// Throws infeasible_variance_error (naming the attribute combination) when
/// the kernel reaches 1.
double idiosyncratic_variance(const AttributeVector& e, const ModelParams& params);

/// Correlation of the binary outcomes implied by marginals (p_i, p_j) and
/// latent correlation r:
///   (Phi2(t_i, t_j; r) - p_i p_j) / sqrt(p_i(1-p_i) p_j(1-p_j)).
double bernoulli_correlation(Probability pi, Probability pj, LatentCorrelation r);

//! View of one attribute-group block of Sigma (copied out, row-major).
std::vector<double> sigma_block(const ModelParams& params, Block b);

}  // namespace copulasim

#endif
