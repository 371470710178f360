#pragma once

#include <vector>

#include "specest/filter_bank.hpp"
#include "specest/spectrum.hpp"

namespace specest {

namespace detail {
/// Index-ordered pairwise reduction; the summation tree depends only on the
/// term count, so results are bitwise reproducible.
Mat pairwise_mat_sum(std::vector<Mat>& terms);
}  // namespace detail

/// Grid average of G Phi G^* over the circle (the generalized moment map).
/// Output is symmetrized; positive definite whenever Phi is PD on the grid.
/// Constant densities bypass the grid through the Stein-equation closed form.
HermMat gamma(const FilterBank& bank, const SpectrumInput& phi, const CircleGrid& grid);

/// Same map with precomputed grid values of G and of the density.
HermMat gamma_samples(const std::vector<Mat>& g_grid, const std::vector<Mat>& phi_samples);

/// X = sum_{k>=0} M^k Q M^{*k} for spectral radius(M) < 1, arbitrary Q,
/// by squaring: X <- X + M X M^*, M <- M^2.
Mat stein_sum(const Mat& m, const Mat& q);

/// Stabilized solution of the Stein equation X = M X M^* + Q (Q Hermitian).
HermMat stein_solve(const Mat& m, const HermMat& q);

/// Exact value of the moment map for a rational density Phi = S S^*: the
/// controllability Gramian of the cascade G(z) S(z). Quadrature-free oracle.
HermMat gamma_exact(const FilterBank& bank, const SpectrumInput::StateSpace& s);

/// Orthonormal basis (in real coordinates) of the range of the moment map,
/// built from images of Hermitian trigonometric monomial densities up to
/// degree 2n. The computed rank must match the closed-form dimension
/// m(2n - m); a mismatch throws DimensionMismatchWithTheory.
class RangeGammaBasis {
 public:
  static RangeGammaBasis compute(const FilterBank& bank);

  int dim() const { return static_cast<int>(basis_.cols()); }
  int hermitian_dim() const { return static_cast<int>(basis_.rows()); }

  HermMat element(int i) const;
  RealCoords project_coords(const HermMat& h) const;
  HermMat project(const HermMat& h) const;
  HermMat from_coords(const Eigen::VectorXd& c) const;

  const Eigen::MatrixXd& coords() const { return basis_; }

 private:
  explicit RangeGammaBasis(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}

  Eigen::MatrixXd basis_;  // n^2 x d, orthonormal columns
};

struct Feasibility {
  bool in_range = false;
  double range_residual = 0.0;
  bool positive_definite = false;
};

/// Diagnostic for Problem feasibility: distance to the range of the moment
/// map (relative, 1e-8 gate) and positive definiteness of Sigma.
Feasibility feasibility(const HermMat& sigma, const RangeGammaBasis& basis);

}  // namespace specest
