#pragma once

#include <vector>

#include "specest/filter_bank.hpp"
#include "specest/hermitian.hpp"

namespace specest {

struct Admissibility {
  bool admissible = false;
  double min_eig = 0.0;
};

/// Grid test of G^* Lambda G > 0 on the circle; min_eig is the smallest
/// eigenvalue seen over the grid. An optional safety margin shifts the gate.
Admissibility lambda_admissible(const FilterBank& bank, const HermMat& lambda,
                                const CircleGrid& grid, double margin = 0.0);
Admissibility lambda_admissible(const std::vector<Mat>& g_grid, const HermMat& lambda,
                                double margin = 0.0);

/// Stabilizing solution P of
///   P = A^*PA - A^*PB (B^*PB)^{-1} B^*PA + Lambda
/// for admissible Lambda (checked on `grid` first). Deflating-subspace method
/// on the extended pencil, polished by Newton/Stein steps.
HermMat dare_stabilizing(const FilterBank& bank, const HermMat& lambda, const CircleGrid& grid);

/// Minimum-phase right spectral factor W of G^* Lambda G:
///   W(z) = C_w (zI - A)^{-1} B + L,  W^* W = G^* Lambda G,
/// with L the right Cholesky factor of B^*PB (upper triangular, positive
/// diagonal), C_w = L^{-*} B^* P A, and stable inverse realized on
/// A_cl = A - B L^{-1} C_w.
class SpectralFactor {
 public:
  SpectralFactor(const FilterBank& bank, HermMat p);

  const HermMat& P() const { return p_; }
  const Mat& L() const { return l_; }
  const Mat& Cw() const { return cw_; }
  const Mat& Acl() const { return acl_; }
  int n() const { return static_cast<int>(acl_.rows()); }
  int m() const { return static_cast<int>(l_.rows()); }

  /// W(e^{j theta}) given the cached bank evaluation at the same angle.
  Mat eval_w(const Mat& g_theta) const { return cw_ * g_theta + l_; }
  Mat eval_w(const FilterBank& bank, double theta) const { return eval_w(bank.evaluate(theta)); }

  /// W(e^{j theta})^{-1} through the inverse state-space realization
  /// L^{-1} - L^{-1} C_w (zI - A_cl)^{-1} B L^{-1}.
  Mat eval_w_inv(double theta) const;

 private:
  HermMat p_;
  Mat l_;      // upper triangular, real positive diagonal
  Mat l_inv_;  // cached L^{-1}
  Mat cw_;
  Mat b_;
  Mat acl_;
};

/// DARE + Cholesky + closed-loop assembly, with the admissibility precheck.
SpectralFactor spectral_factor(const FilterBank& bank, const HermMat& lambda,
                               const CircleGrid& grid);

namespace detail {

/// Core solver without the grid precheck. Success certifies admissibility:
/// a stabilizing P with B^*PB > 0 forces W^*W = G^* Lambda G > 0 on the
/// circle. `warm` enables the Newton/Stein path seeded from a nearby P before
/// falling back to the QZ subspace method.
HermMat dare_core(const FilterBank& bank, const HermMat& lambda, const HermMat* warm);

}  // namespace detail

}  // namespace specest
