#include "specest/moment_map.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace specest {

namespace {

Mat pairwise_sum_range(std::vector<Mat>& terms, int lo, int hi) {
  if (hi - lo == 1) return terms[lo];
  const int mid = lo + (hi - lo) / 2;
  return pairwise_sum_range(terms, lo, mid) + pairwise_sum_range(terms, mid, hi);
}

}  // namespace

namespace detail {

Mat pairwise_mat_sum(std::vector<Mat>& terms) {
  if (terms.empty()) raise(ErrorCode::DimensionMismatch, "empty sum");
  return pairwise_sum_range(terms, 0, static_cast<int>(terms.size()));
}

}  // namespace detail

HermMat gamma_samples(const std::vector<Mat>& g_grid, const std::vector<Mat>& phi_samples) {
  if (g_grid.size() != phi_samples.size() || g_grid.empty()) {
    raise(ErrorCode::GridMismatch, "grid evaluation and density sample counts differ");
  }
  std::vector<Mat> terms(g_grid.size());
  for (size_t k = 0; k < g_grid.size(); ++k) {
    terms[k] = g_grid[k] * phi_samples[k] * g_grid[k].adjoint();
  }
  Mat total = detail::pairwise_mat_sum(terms);
  total *= 1.0 / static_cast<double>(g_grid.size());
  return HermMat(hermitian_part(total));
}

HermMat gamma(const FilterBank& bank, const SpectrumInput& phi, const CircleGrid& grid) {
  if (phi.m() != bank.m()) {
    raise(ErrorCode::DimensionMismatch, "density dimension does not match bank inputs");
  }
  if (phi.kind() == SpectrumInput::Kind::Constant) {
    // stein-based Gramian sandwich, no gridding
    const Mat c = phi.eval(0.0);
    return stein_solve(bank.A(), HermMat(hermitian_part(bank.B() * c * bank.B().adjoint())));
  }
  return gamma_samples(bank.evaluate_grid(grid), phi.samples(grid));
}

Mat stein_sum(const Mat& m, const Mat& q) {
  if (m.rows() != m.cols() || q.rows() != m.rows() || q.cols() != m.cols()) {
    raise(ErrorCode::DimensionMismatch, "stein_sum needs square same-size operands");
  }
  const double rho = spectral_radius(m);
  if (!(rho < 1.0)) {
    raise(ErrorCode::NotStable, "spectral radius " + std::to_string(rho) + " >= 1");
  }
  Mat x = q;
  Mat t = m;
  const double scale = std::max(q.norm(), 1e-300);
  for (int iter = 0; iter < 128; ++iter) {
    Mat incr = t * x * t.adjoint();
    x += incr;
    if (incr.norm() <= 1e-16 * std::max(x.norm(), scale)) return x;
    t = t * t;
  }
  raise(ErrorCode::NotStable, "stein_sum did not converge");
}

HermMat stein_solve(const Mat& m, const HermMat& q) {
  Mat x = stein_sum(m, q.mat());
  HermMat result(hermitian_part(x));
  const double residual = (result.mat() - m * result.mat() * m.adjoint() - q.mat()).norm();
  if (residual > 1e-12 * std::max({q.norm(), result.norm(), 1.0})) {
    raise(ErrorCode::ConvergenceFailure, "stein residual " + std::to_string(residual));
  }
  return result;
}

HermMat gamma_exact(const FilterBank& bank, const SpectrumInput::StateSpace& s) {
  if (s.b.cols() != bank.m() || s.c.rows() != bank.m()) {
    raise(ErrorCode::DimensionMismatch, "factor must map m inputs to m outputs");
  }
  const int n = bank.n();
  const int ns = s.order();
  // cascade G(z) S(z): stack the bank state on top of the factor state
  Mat ac = Mat::Zero(n + ns, n + ns);
  ac.topLeftCorner(n, n) = bank.A();
  ac.topRightCorner(n, ns) = bank.B() * s.c;
  ac.bottomRightCorner(ns, ns) = s.a;
  Mat bc(n + ns, s.b.cols());
  bc.topRows(n) = bank.B() * s.d;
  bc.bottomRows(ns) = s.b;
  Mat gram = stein_sum(ac, bc * bc.adjoint());
  return HermMat(hermitian_part(gram.topLeftCorner(n, n)));
}

RangeGammaBasis RangeGammaBasis::compute(const FilterBank& bank) {
  const int n = bank.n();
  const int m = bank.m();
  const int expected = m * (2 * n - m);

  // Images of Phi(theta) = E e^{jk theta} + E^* e^{-jk theta}:
  //   Gamma(Phi) = A^k S_E + (A^k S_E)^*,  S_E = sum_j A^j B E B^* A^{*j}.
  // k runs to 2n (saturates by Cayley-Hamilton well before that), E over the
  // elementary m x m matrices and their i-multiples.
  std::vector<Mat> stein_images;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      for (int phase = 0; phase < 2; ++phase) {
        Mat e = Mat::Zero(m, m);
        e(r, c) = phase == 0 ? Complex(1, 0) : Complex(0, 1);
        stein_images.push_back(stein_sum(bank.A(), bank.B() * e * bank.B().adjoint()));
      }
    }
  }
  std::vector<RealCoords> images;
  Mat a_pow = Mat::Identity(n, n);
  for (int k = 0; k <= 2 * n; ++k) {
    for (const Mat& s_e : stein_images) {
      Mat img = a_pow * s_e;
      images.push_back(to_real_coords(HermMat(img + img.adjoint())));
    }
    a_pow = a_pow * bank.A();
  }

  // modified Gram-Schmidt with rank gate
  double max_norm = 0.0;
  for (const auto& v : images) max_norm = std::max(max_norm, v.norm());
  const double tol = 1e-10 * max_norm;

  Eigen::MatrixXd basis(n * n, expected);
  int rank = 0;
  for (auto& v : images) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < rank; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    }
    const double norm = v.norm();
    if (norm > tol) {
      if (rank == expected) {
        raise(ErrorCode::DimensionMismatchWithTheory,
              "range rank exceeds m(2n-m) = " + std::to_string(expected));
      }
      basis.col(rank++) = v / norm;
    }
  }
  if (rank != expected) {
    raise(ErrorCode::DimensionMismatchWithTheory,
          "range rank " + std::to_string(rank) + " != m(2n-m) = " + std::to_string(expected));
  }
  return RangeGammaBasis(std::move(basis));
}

HermMat RangeGammaBasis::element(int i) const { return from_real_coords(basis_.col(i)); }

RealCoords RangeGammaBasis::project_coords(const HermMat& h) const {
  if (h.dim() * h.dim() != hermitian_dim()) {
    raise(ErrorCode::DimensionMismatch, "matrix dimension does not match basis");
  }
  return basis_.transpose() * to_real_coords(h);
}

HermMat RangeGammaBasis::project(const HermMat& h) const {
  return from_real_coords(basis_ * project_coords(h));
}

HermMat RangeGammaBasis::from_coords(const Eigen::VectorXd& c) const {
  if (c.size() != dim()) raise(ErrorCode::DimensionMismatch, "coordinate length != basis dim");
  return from_real_coords(basis_ * c);
}

Feasibility feasibility(const HermMat& sigma, const RangeGammaBasis& basis) {
  Feasibility f;
  const HermMat proj = basis.project(sigma);
  const double num = (sigma.mat() - proj.mat()).norm();
  const double den = sigma.norm();
  f.range_residual = den > 0.0 ? num / den : 0.0;
  f.in_range = f.range_residual <= 1e-8;
  Eigen::SelfAdjointEigenSolver<Mat> eig(sigma.mat(), Eigen::EigenvaluesOnly);
  f.positive_definite = eig.eigenvalues()[0] > 0.0;
  return f;
}

}  // namespace specest
