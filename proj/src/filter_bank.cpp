#include "specest/filter_bank.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

namespace specest {

FilterBank FilterBank::create(Mat a, Mat b) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  if (a.cols() != n || b.rows() != n) {
    raise(ErrorCode::DimensionMismatch, "A must be n x n and B must be n x m");
  }
  if (n < m || m < 1) {
    raise(ErrorCode::DimensionMismatch, "need n >= m >= 1");
  }

  const double rho = spectral_radius(a);
  if (!(rho < 1.0)) {
    raise(ErrorCode::NotSchurStable, "spectral radius " + std::to_string(rho));
  }

  {
    Eigen::JacobiSVD<Mat> svd(b);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= 1e-10 * sv[0]) {
      raise(ErrorCode::RankDeficientB, "B is not of full column rank");
    }
  }

  {
    Mat ctrb(n, n * m);
    Mat block = b;
    for (int k = 0; k < n; ++k) {
      ctrb.middleCols(k * m, m) = block;
      block = a * block;
    }
    Eigen::JacobiSVD<Mat> svd(ctrb);
    const auto& sv = svd.singularValues();
    if (sv[n - 1] <= 1e-10 * sv[0]) {
      raise(ErrorCode::NotReachable, "controllability matrix is rank deficient");
    }
  }

  return FilterBank(std::move(a), std::move(b));
}

FilterBank FilterBank::covext(int m, int p) {
  if (m < 1 || p < 0) {
    raise(ErrorCode::DimensionMismatch, "covext bank needs m >= 1, p >= 0");
  }
  const int n = m * (p + 1);
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i + 1 <= p; ++i) {
    a.block(i * m, (i + 1) * m, m, m) = Mat::Identity(m, m);
  }
  Mat b = Mat::Zero(n, m);
  b.bottomRows(m) = Mat::Identity(m, m);
  return FilterBank(std::move(a), std::move(b));
}

Mat FilterBank::evaluate(double theta) const {
  const int sz = n();
  const Complex z = std::polar(1.0, theta);
  Mat lhs = z * Mat::Identity(sz, sz) - a_;
  return lhs.partialPivLu().solve(b_);
}

std::vector<Mat> FilterBank::evaluate_grid(const CircleGrid& grid) const {
  std::vector<Mat> values;
  values.reserve(grid.size());
  for (int k = 0; k < grid.size(); ++k) values.push_back(evaluate(grid.angle(k)));
  return values;
}

bool is_covext_companion(const FilterBank& bank, int m) {
  const int n = bank.n();
  if (m < 1 || bank.m() != m || n % m != 0) return false;
  const int p = n / m - 1;
  Mat a_ref = Mat::Zero(n, n);
  for (int i = 0; i + 1 <= p; ++i) {
    a_ref.block(i * m, (i + 1) * m, m, m) = Mat::Identity(m, m);
  }
  Mat b_ref = Mat::Zero(n, m);
  b_ref.bottomRows(m) = Mat::Identity(m, m);
  return (bank.A() - a_ref).cwiseAbs().maxCoeff() == 0.0 &&
         (bank.B() - b_ref).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace specest
