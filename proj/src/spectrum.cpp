#include "specest/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace specest {

Mat SpectrumInput::StateSpace::eval(double theta) const {
  if (order() == 0) return d;
  const Complex z = std::polar(1.0, theta);
  Mat lhs = z * Mat::Identity(order(), order()) - a;
  return c * lhs.partialPivLu().solve(b) + d;
}

SpectrumInput SpectrumInput::constant(HermMat c) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(c.mat(), Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()[0] > 0.0)) {
    raise(ErrorCode::NotPD, "constant density must be positive definite");
  }
  SpectrumInput s;
  s.kind_ = Kind::Constant;
  s.m_ = c.dim();
  s.constant_ = c.mat();
  return s;
}

SpectrumInput SpectrumInput::grid_samples(CircleGrid grid, std::vector<Mat> samples) {
  if (static_cast<int>(samples.size()) != grid.size()) {
    raise(ErrorCode::GridMismatch, "sample count differs from grid size");
  }
  const int m = static_cast<int>(samples.front().rows());
  for (const Mat& s : samples) {
    if (s.rows() != m || s.cols() != m) {
      raise(ErrorCode::DimensionMismatch, "density samples must all be m x m");
    }
    if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, s.norm())) {
      raise(ErrorCode::NotHermitian, "density sample is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues()[0] > 0.0)) {
      raise(ErrorCode::NotPD, "density sample is not positive definite on the grid");
    }
  }
  SpectrumInput s;
  s.kind_ = Kind::GridSamples;
  s.m_ = m;
  s.sample_grid_ = grid;
  s.samples_ = std::move(samples);
  return s;
}

SpectrumInput SpectrumInput::rational_factor(Mat a, Mat b, Mat c, Mat d) {
  const int order = static_cast<int>(a.rows());
  const int m = static_cast<int>(d.rows());
  if (a.cols() != order || b.rows() != order || b.cols() != m || c.rows() != m ||
      c.cols() != order || d.cols() != m) {
    raise(ErrorCode::DimensionMismatch, "factor state space must be square m x m");
  }
  if (order > 0 && !(spectral_radius(a) < 1.0)) {
    raise(ErrorCode::NotStable, "factor A matrix is not Schur stable");
  }
  SpectrumInput s;
  s.kind_ = Kind::RationalFactor;
  s.m_ = m;
  s.factor_ = StateSpace{std::move(a), std::move(b), std::move(c), std::move(d)};
  // nonsingularity of N on the circle, probed on the default grid
  const CircleGrid probe(256);
  for (int k = 0; k < probe.size(); ++k) {
    Mat n = s.factor_->eval(probe.angle(k));
    Eigen::JacobiSVD<Mat> svd(n);
    const auto& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] > 1e-12 * std::max(1.0, sv[0]))) {
      raise(ErrorCode::NotPD, "factor N(z) is singular on the unit circle");
    }
  }
  return s;
}

SpectrumInput SpectrumInput::ma_polynomial(std::vector<Mat> coeffs) {
  if (coeffs.empty()) raise(ErrorCode::DimensionMismatch, "need at least one coefficient");
  const int m = static_cast<int>(coeffs.front().rows());
  const int q = static_cast<int>(coeffs.size()) - 1;
  for (const Mat& c : coeffs) {
    if (c.rows() != m || c.cols() != m) {
      raise(ErrorCode::DimensionMismatch, "coefficients must all be m x m");
    }
  }
  // shift-register realization: x holds the last q inputs
  const int order = m * q;
  Mat a = Mat::Zero(order, order);
  for (int i = 0; i + 1 < q; ++i) a.block((i + 1) * m, i * m, m, m) = Mat::Identity(m, m);
  Mat b = Mat::Zero(order, m);
  if (q > 0) b.topRows(m) = Mat::Identity(m, m);
  Mat c = Mat::Zero(m, order);
  for (int k = 1; k <= q; ++k) c.middleCols((k - 1) * m, m) = coeffs[k];
  SpectrumInput s = rational_factor(std::move(a), std::move(b), std::move(c), coeffs[0]);
  s.ma_coeffs_ = std::move(coeffs);
  return s;
}

Mat SpectrumInput::eval(double theta) const {
  switch (kind_) {
    case Kind::Constant:
      return *constant_;
    case Kind::RationalFactor: {
      Mat n = factor_->eval(theta);
      return n * n.adjoint();
    }
    case Kind::GridSamples:
      raise(ErrorCode::GridMismatch, "grid-sampled density cannot be evaluated off-grid");
  }
  raise(ErrorCode::DimensionMismatch, "unreachable");
}

std::vector<Mat> SpectrumInput::samples(const CircleGrid& grid) const {
  if (kind_ == Kind::GridSamples) {
    if (!(grid == *sample_grid_)) {
      raise(ErrorCode::GridMismatch, "density was sampled on a different grid");
    }
    return samples_;
  }
  std::vector<Mat> out;
  out.reserve(grid.size());
  for (int k = 0; k < grid.size(); ++k) out.push_back(eval(grid.angle(k)));
  return out;
}

}  // namespace specest
