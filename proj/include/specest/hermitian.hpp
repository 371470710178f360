#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "specest/errors.hpp"

namespace specest {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

// Real-coordinate image of a Hermitian matrix: n^2 reals, Frobenius-isometric.
using RealCoords = Eigen::VectorXd;

/// An n x n complex Hermitian matrix. Construction symmetrizes inputs whose
/// asymmetry is below `tol` (absolute, entrywise) and rejects anything worse.
class HermMat {
 public:
  HermMat() : m_(Mat::Zero(0, 0)) {}
  explicit HermMat(Mat entries, double tol = 1e-12);

  static HermMat identity(int n) { return HermMat(Mat::Identity(n, n)); }
  static HermMat zero(int n) { return HermMat(Mat::Zero(n, n)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& mat() const { return m_; }
  double norm() const { return m_.norm(); }

 private:
  Mat m_;
};

/// Right Cholesky factor: upper-triangular L with real positive diagonal and
/// L^* L = H. Throws NotPositiveDefinite when a pivot falls at or below `tol`.
Mat cholesky_right(const HermMat& h, double tol = 0.0);

struct HermEig {
  Eigen::VectorXd values;  // ascending
  Mat vectors;             // unitary columns
};

HermEig eig_hermitian(const HermMat& h);

/// Hermitian PSD square root via eigendecomposition. Eigenvalues in
/// [-1e-12*||H||, 0) are clamped to zero; anything smaller throws NotPSD.
HermMat psd_sqrt(const HermMat& h);

RealCoords to_real_coords(const HermMat& h);
HermMat from_real_coords(const RealCoords& v);

inline double frobenius_inner(const HermMat& a, const HermMat& b) {
  if (a.dim() != b.dim()) raise(ErrorCode::DimensionMismatch, "frobenius_inner");
  return (a.mat().adjoint() * b.mat()).trace().real();
}

/// Symmetrize an almost-Hermitian matrix (quadrature output, solver iterates).
inline Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double spectral_radius(const Mat& m);

}  // namespace specest
