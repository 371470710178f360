#include "specest/hermitian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace specest {

HermMat::HermMat(Mat entries, double tol) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) {
    raise(ErrorCode::DimensionMismatch, "HermMat requires a square matrix");
  }
  const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    raise(ErrorCode::NotHermitian,
          "entrywise asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
  if (asym > 0.0) m_ = 0.5 * (m_ + m_.adjoint());
  // force exactly real diagonal
  for (int i = 0; i < m_.rows(); ++i) m_(i, i) = Complex(m_(i, i).real(), 0.0);
}

Mat cholesky_right(const HermMat& h, double tol) {
  const Mat& a = h.mat();
  const int n = h.dim();
  // Lower factor of H, then L = (lower)^*: gives H = L^* L with L upper.
  Mat low = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    Complex acc = a(j, j);
    for (int k = 0; k < j; ++k) acc -= low(j, k) * std::conj(low(j, k));
    const double pivot = acc.real();
    if (!(pivot > tol)) {
      raise(ErrorCode::NotPositiveDefinite,
            "pivot " + std::to_string(pivot) + " at column " + std::to_string(j));
    }
    const double d = std::sqrt(pivot);
    low(j, j) = d;
    for (int i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (int k = 0; k < j; ++k) s -= low(i, k) * std::conj(low(j, k));
      low(i, j) = s / d;
    }
  }
  return low.adjoint();
}

HermEig eig_hermitian(const HermMat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(h.mat());
  if (solver.info() != Eigen::Success) {
    raise(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
  }
  return HermEig{solver.eigenvalues(), solver.eigenvectors()};
}

HermMat psd_sqrt(const HermMat& h) {
  HermEig e = eig_hermitian(h);
  const double scale = h.norm();
  const double floor = -1e-12 * std::max(scale, 1.0);
  Eigen::VectorXd roots(e.values.size());
  for (int i = 0; i < e.values.size(); ++i) {
    double v = e.values[i];
    if (v < floor) {
      raise(ErrorCode::NotPSD, "eigenvalue " + std::to_string(v) + " below PSD tolerance");
    }
    roots[i] = std::sqrt(std::max(v, 0.0));
  }
  Mat s = e.vectors * roots.asDiagonal() * e.vectors.adjoint();
  return HermMat(hermitian_part(s));
}

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

RealCoords to_real_coords(const HermMat& h) {
  const int n = h.dim();
  const Mat& m = h.mat();
  RealCoords v(n * n);
  int idx = 0;
  for (int i = 0; i < n; ++i) v[idx++] = m(i, i).real();
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      v[idx++] = kSqrt2 * m(i, j).real();
      v[idx++] = kSqrt2 * m(i, j).imag();
    }
  }
  return v;
}

HermMat from_real_coords(const RealCoords& v) {
  const auto n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (static_cast<long long>(n) * n != v.size()) {
    raise(ErrorCode::DimensionMismatch, "coordinate vector length is not a perfect square");
  }
  Mat m = Mat::Zero(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i) m(i, i) = v[idx++];
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double re = v[idx++] / kSqrt2;
      const double im = v[idx++] / kSqrt2;
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  }
  return HermMat(std::move(m));
}

double spectral_radius(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    raise(ErrorCode::ConvergenceFailure, "eigensolver failed computing spectral radius");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace specest
