#ifndef COPULASIM_FIXTURES_HPP
#define COPULASIM_FIXTURES_HPP

#include "copulasim/generator.hpp"
#include "copulasim/params.hpp"
#include "copulasim/tables.hpp"

namespace copulasim::fixtures {

// Built-in study fixtures so the whole pipeline runs without external data:
// the 9,255-deal attribute marginals, the full ordered pair-count table, the
// hot-bucket counts, and the estimated latent covariance with alpha0 = 0.

MarginalCounts marginals();
PairCountTable pair_counts();
GeneratorTargets generator_targets();

//! The published estimated covariance table, exactly as shipped.
Matrix12 sigma_table();

//! Model parameters built from the covariance fixture with alpha0 = 0.
ModelParams model_params();

//! Loads a 12x12 labeled covariance table (same layout as the pair-count
//! fixture files, real-valued cells).
Matrix12 load_sigma(const std::string& path);
void save_sigma(const Matrix12& sigma, const std::string& path);

}  // namespace copulasim::fixtures

#endif
