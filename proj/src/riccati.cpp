#include "specest/riccati.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <vector>

#include "specest/moment_map.hpp"

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

namespace specest {

Admissibility lambda_admissible(const std::vector<Mat>& g_grid, const HermMat& lambda,
                                double margin) {
  double min_eig = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> eig;
  for (const Mat& g : g_grid) {
    const Mat q = hermitian_part(g.adjoint() * lambda.mat() * g);
    if (q.rows() <= 3) {
      eig.computeDirect(q, Eigen::EigenvaluesOnly);
    } else {
      eig.compute(q, Eigen::EigenvaluesOnly);
    }
    min_eig = std::min(min_eig, eig.eigenvalues()[0]);
  }
  return Admissibility{min_eig > margin, min_eig};
}

Admissibility lambda_admissible(const FilterBank& bank, const HermMat& lambda,
                                const CircleGrid& grid, double margin) {
  if (lambda.dim() != bank.n()) {
    raise(ErrorCode::DimensionMismatch, "Lambda must be n x n");
  }
  return lambda_admissible(bank.evaluate_grid(grid), lambda, margin);
}

namespace {

Mat dare_residual(const FilterBank& bank, const HermMat& lambda, const Mat& p) {
  const Mat& a = bank.A();
  const Mat& b = bank.B();
  Mat bpb = b.adjoint() * p * b;
  Mat bpa = b.adjoint() * p * a;
  Mat quad = bpa.adjoint() * bpb.partialPivLu().solve(bpa);
  return p - (a.adjoint() * p * a - quad + lambda.mat());
}

double residual_scale(const HermMat& lambda) { return std::max(lambda.norm(), 1.0); }

lapack_logical inside_unit_disk(const lapack_complex_double* alpha,
                                const lapack_complex_double* beta) {
  return std::abs(*alpha) < std::abs(*beta);
}

// Right deflating subspace of the extended pencil
//   M - z L,  M = [A 0 B; -Q I 0; 0 0 0],  L = [I 0 0; 0 A^* 0; 0 -B^* 0]
// for the generalized eigenvalues inside the unit disk (cf. Van Dooren 1981;
// the extended form tolerates both the zero quadratic-weight block and a
// singular A). Exactly n eigenvalues must be selected.
Mat dare_qz_subspace(const FilterBank& bank, const HermMat& lambda) {
  const int n = bank.n();
  const int m = bank.m();
  const int sz = 2 * n + m;

  Mat pm = Mat::Zero(sz, sz);
  Mat pl = Mat::Zero(sz, sz);
  pm.topLeftCorner(n, n) = bank.A();
  pm.block(0, 2 * n, n, m) = bank.B();
  pm.block(n, 0, n, n) = -lambda.mat();
  pm.block(n, n, n, n) = Mat::Identity(n, n);
  pl.topLeftCorner(n, n) = Mat::Identity(n, n);
  pl.block(n, n, n, n) = bank.A().adjoint();
  pl.block(2 * n, n, m, n) = -bank.B().adjoint();

  std::vector<Complex> alpha(sz), beta(sz);
  Mat vsr(sz, sz);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_zgges(LAPACK_COL_MAJOR, 'N', 'V', 'S', inside_unit_disk, sz,
                                  pm.data(), sz, pl.data(), sz, &sdim, alpha.data(), beta.data(),
                                  nullptr, sz, vsr.data(), sz);
  if (info != 0) {
    raise(ErrorCode::SolverDivergence, "QZ iteration failed (info=" + std::to_string(info) + ")");
  }
  if (sdim != n) {
    raise(ErrorCode::SolverDivergence,
          "expected " + std::to_string(n) + " stable pencil eigenvalues, found " +
              std::to_string(sdim));
  }

  Mat u1 = vsr.block(0, 0, n, n);
  Mat u2 = vsr.block(n, 0, n, n);
  Eigen::PartialPivLU<Mat> lu(u1.transpose());
  if (std::abs(lu.determinant()) < 1e-300) {
    raise(ErrorCode::SolverDivergence, "deflating subspace is not a graph over the state block");
  }
  Mat p = lu.solve(u2.transpose()).transpose();
  return hermitian_part(p);
}

// One Newton (Hewer) step: with K = (B^*PB)^{-1} B^*PA and A_cl = A - BK,
// the update solves X = A_cl^* X A_cl + Lambda. Quadratically convergent
// near the stabilizing solution; each step is one Stein solve.
bool hewer_step(const FilterBank& bank, const HermMat& lambda, Mat& p) {
  const Mat& a = bank.A();
  const Mat& b = bank.B();
  Mat bpb = hermitian_part(b.adjoint() * p * b);
  Eigen::LLT<Mat> llt(bpb);
  if (llt.info() != Eigen::Success) return false;
  Mat k = llt.solve(b.adjoint() * p * a);
  Mat acl = a - b * k;
  if (!(spectral_radius(acl) < 1.0)) return false;
  p = stein_sum(acl.adjoint(), lambda.mat());
  p = hermitian_part(p);
  return true;
}

}  // namespace

namespace detail {

HermMat dare_core(const FilterBank& bank, const HermMat& lambda, const HermMat* warm) {
  if (lambda.dim() != bank.n()) {
    raise(ErrorCode::DimensionMismatch, "Lambda must be n x n");
  }
  const double scale = residual_scale(lambda);
  const double tol = 1e-12 * scale;

  Mat p;
  bool have_p = false;
  if (warm != nullptr) {
    p = warm->mat();
    double prev = dare_residual(bank, lambda, p).norm();
    for (int iter = 0; iter < 20 && prev > tol; ++iter) {
      Mat saved = p;
      if (!hewer_step(bank, lambda, p)) {
        p = saved;
        break;
      }
      const double res = dare_residual(bank, lambda, p).norm();
      if (!(res < prev)) {
        // stalled; keep the better iterate and let QZ decide
        if (res > prev) p = saved;
        prev = std::min(res, prev);
        break;
      }
      prev = res;
    }
    have_p = prev <= tol;
  }

  if (!have_p) {
    p = dare_qz_subspace(bank, lambda);
    double prev = dare_residual(bank, lambda, p).norm();
    for (int iter = 0; iter < 10 && prev > tol; ++iter) {
      Mat saved = p;
      if (!hewer_step(bank, lambda, p)) {
        p = saved;
        break;
      }
      const double res = dare_residual(bank, lambda, p).norm();
      if (!(res < prev)) {
        if (res > prev) p = saved;
        break;
      }
      prev = res;
    }
  }

  const double res = dare_residual(bank, lambda, p).norm();
  if (res > 1e-10 * scale) {
    raise(ErrorCode::SolverDivergence, "DARE residual " + std::to_string(res));
  }
  return HermMat(hermitian_part(p), 1e-9 * scale + 1e-12);
}

}  // namespace detail

HermMat dare_stabilizing(const FilterBank& bank, const HermMat& lambda, const CircleGrid& grid) {
  Admissibility adm = lambda_admissible(bank, lambda, grid);
  if (!adm.admissible) {
    raise(ErrorCode::NotAdmissible,
          "G^* Lambda G has minimum eigenvalue " + std::to_string(adm.min_eig) + " on the grid");
  }
  return detail::dare_core(bank, lambda, nullptr);
}

SpectralFactor::SpectralFactor(const FilterBank& bank, HermMat p) : p_(std::move(p)) {
  const Mat& a = bank.A();
  b_ = bank.B();
  const Mat bpb = hermitian_part(b_.adjoint() * p_.mat() * b_);
  l_ = cholesky_right(HermMat(bpb), 0.0);
  // C_w = L^{-*} B^*PA: solve with the lower-triangular L^*
  cw_ = l_.adjoint().triangularView<Eigen::Lower>().solve(b_.adjoint() * p_.mat() * a);
  l_inv_ = l_.triangularView<Eigen::Upper>().solve(Mat::Identity(m(), m()));
  acl_ = a - b_ * l_inv_ * cw_;
  const double rho = spectral_radius(acl_);
  if (!(rho < 1.0)) {
    raise(ErrorCode::SolverDivergence,
          "closed loop is not stable (spectral radius " + std::to_string(rho) + ")");
  }
}

Mat SpectralFactor::eval_w_inv(double theta) const {
  const Complex z = std::polar(1.0, theta);
  Mat lhs = z * Mat::Identity(n(), n()) - acl_;
  Mat core = lhs.partialPivLu().solve(b_ * l_inv_);
  return l_inv_ - l_inv_ * cw_ * core;
}

SpectralFactor spectral_factor(const FilterBank& bank, const HermMat& lambda,
                               const CircleGrid& grid) {
  return SpectralFactor(bank, dare_stabilizing(bank, lambda, grid));
}

}  // namespace specest
