#include "specest/estimator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

namespace specest {

void EstimationOptions::validate() const {
  if (grid_n < 2 || (grid_n & (grid_n - 1)) != 0) {
    raise(ErrorCode::ConfigError, "grid size must be a power of two");
  }
  if (!(tol_fp > 0.0) || !(tol_mom > 0.0)) {
    raise(ErrorCode::ConfigError, "tolerances must be positive");
  }
  if (max_iter < 1) raise(ErrorCode::ConfigError, "max_iter must be positive");
  if (!(dt_min > 0.0) || !(dt_min < dt_init) || !(dt_init <= 1.0)) {
    raise(ErrorCode::ConfigError, "need 0 < dt_min < dt_init <= 1");
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::HomotopyStuck: return "HomotopyStuck";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

namespace {

// Phi = W^{-1} Psi W^{-*} pointwise, with W evaluated from cached G values.
std::vector<Mat> phi_from_factor(const SpectralFactor& sf, const std::vector<Mat>& g_grid,
                                 const std::vector<Mat>& density) {
  std::vector<Mat> phi(g_grid.size());
  for (size_t k = 0; k < g_grid.size(); ++k) {
    Eigen::PartialPivLU<Mat> lu(sf.eval_w(g_grid[k]));
    Mat x = lu.solve(density[k]);
    phi[k] = hermitian_part(lu.solve(x.adjoint()));
  }
  return phi;
}

std::vector<Mat> blend_samples(const std::vector<Mat>& psi, double t) {
  std::vector<Mat> out(psi.size());
  const int m = static_cast<int>(psi.front().rows());
  const Mat eye = Mat::Identity(m, m);
  for (size_t k = 0; k < psi.size(); ++k) out[k] = t * psi[k] + (1.0 - t) * eye;
  return out;
}

struct SolverContext {
  const FilterBank& bank;            // original bank
  const FilterBank& nbank;           // normalized bank
  const CircleGrid& grid;
  const std::vector<Mat>& g_orig;    // G on the grid
  const std::vector<Mat>& g_norm;    // G' = T G on the grid
  const RangeGammaBasis& basis;      // range basis of the normalized map
  const HermMat& sigma;
  const Mat& t_fwd;                  // Sigma^{-1/2}
  const Mat& t_inv;                  // Sigma^{1/2}
  const EstimationOptions& opts;
  std::vector<TraceRecord>& trace;
};

// Moment image of phi under the original bank, and its distance to Sigma.
double moment_residual_of(const SolverContext& ctx, const std::vector<Mat>& phi,
                          HermMat* gamma_out = nullptr) {
  HermMat g = gamma_samples(ctx.g_orig, phi);
  const double r = (g.mat() - ctx.sigma.mat()).norm() / ctx.sigma.norm();
  if (gamma_out != nullptr) *gamma_out = g;
  return r;
}

struct MaxentEval {
  double objective = std::numeric_limits<double>::infinity();
  bool admissible = false;
  HermMat omega_tilde_norm;  // normalized-problem moment image
};

// J(Lambda') = tr(Lambda') - int log det G'^* Lambda' G', plus the gradient
// ingredient omega~'(Lambda') when the point is admissible.
MaxentEval maxent_objective(const SolverContext& ctx, const HermMat& lambda,
                            bool want_gradient) {
  MaxentEval ev;
  const int npts = ctx.grid.size();
  double logdet_sum = 0.0;
  std::vector<Mat> terms;
  if (want_gradient) terms.resize(npts);
  for (int k = 0; k < npts; ++k) {
    const Mat& g = ctx.g_norm[k];
    Mat q = hermitian_part(g.adjoint() * lambda.mat() * g);
    Eigen::LLT<Mat> llt(q);
    if (llt.info() != Eigen::Success) return ev;  // not admissible: J = +inf
    double ld = 0.0;
    for (int i = 0; i < q.rows(); ++i) {
      const double piv = std::real(llt.matrixLLT()(i, i));
      if (!(piv > 0.0)) return ev;
      ld += std::log(piv);
    }
    logdet_sum += 2.0 * ld;
    if (want_gradient) terms[k] = g * llt.solve(g.adjoint());
  }
  ev.admissible = true;
  ev.objective = lambda.mat().trace().real() - logdet_sum / npts;
  if (want_gradient) {
    Mat total = detail::pairwise_mat_sum(terms) / static_cast<double>(npts);
    ev.omega_tilde_norm = HermMat(hermitian_part(total));
  }
  return ev;
}

// Hessian of the dual in range-basis coordinates, assembled on a coarsened
// grid: H_ab = int tr(Q^{-1} M_a Q^{-1} M_b), M_a = G'^* E_a G'. The Newton
// direction tolerates a low-order Hessian; optimality is always measured
// against the full-grid gradient.
Eigen::MatrixXd maxent_hessian(const SolverContext& ctx, const HermMat& lambda,
                               const std::vector<Mat>& basis_mats) {
  const int d = static_cast<int>(basis_mats.size());
  const int coarse = std::max(256, ctx.grid.size() / 8);
  const CircleGrid hgrid(std::min(coarse, ctx.grid.size()));
  const int stride = ctx.grid.size() / hgrid.size();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  std::vector<Mat> x(d);
  for (int k = 0; k < hgrid.size(); ++k) {
    const Mat& g = ctx.g_norm[static_cast<size_t>(k) * stride];
    Mat q = hermitian_part(g.adjoint() * lambda.mat() * g);
    Eigen::LLT<Mat> llt(q);
    if (llt.info() != Eigen::Success) {
      raise(ErrorCode::NotAdmissible, "Hessian requested at an inadmissible point");
    }
    for (int a = 0; a < d; ++a) {
      x[a] = llt.solve(g.adjoint() * basis_mats[a] * g);
    }
    for (int a = 0; a < d; ++a) {
      for (int b = a; b < d; ++b) {
        const double v = (x[a] * x[b]).trace().real();
        h(a, b) += v;
      }
    }
  }
  h /= hgrid.size();
  h = h.selfadjointView<Eigen::Upper>();
  return h;
}

struct StageOutcome {
  bool ok = false;
  std::string why;
};

// Damped Newton on the convex dual of the identity-prior problem. Writes the
// anchor multiplier (normalized coordinates) into lambda_io.
StageOutcome maxent_stage(const SolverContext& ctx, HermMat& lambda_io) {
  const int n = ctx.nbank.n();
  const int d = ctx.basis.dim();

  std::vector<Mat> basis_mats(d);
  for (int a = 0; a < d; ++a) basis_mats[a] = ctx.basis.element(a).mat();

  // start from the projected identity-multiple; if projection pushed it out
  // of the admissible cone, use the controllability Gramian (= Gamma'(I),
  // always admissible and in range)
  HermMat lam = ctx.basis.project(HermMat(Mat::Identity(n, n) / n));
  if (!maxent_objective(ctx, lam, false).admissible) {
    lam = stein_solve(ctx.nbank.A(), HermMat(hermitian_part(ctx.nbank.B() * ctx.nbank.B().adjoint())));
    lam = ctx.basis.project(lam);
  }

  Eigen::VectorXd c = ctx.basis.project_coords(lam);
  const Eigen::VectorXd c_target = ctx.basis.project_coords(HermMat::identity(n));
  const double target = std::min(ctx.opts.tol_mom, 1e-10);

  MaxentEval ev = maxent_objective(ctx, lam, true);
  if (!ev.admissible) {
    lambda_io = lam;
    return {false, "maxent start is not admissible"};
  }
  double last_step = 0.0;
  for (int iter = 0; iter < ctx.opts.max_iter; ++iter) {
    // residual reported on the original problem scale
    const Mat gap = ev.omega_tilde_norm.mat() - Mat::Identity(n, n);
    const double resid = (ctx.t_inv * gap * ctx.t_inv.adjoint()).norm() / ctx.sigma.norm();
    ctx.trace.push_back({0.0, iter, last_step, resid});
    if (resid <= target) {
      lambda_io = lam;
      return {true, ""};
    }

    Eigen::VectorXd grad = c_target - ctx.basis.project_coords(ev.omega_tilde_norm);
    Eigen::VectorXd step;
    Eigen::MatrixXd h = maxent_hessian(ctx, lam, basis_mats);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() == Eigen::Success) {
      step = ldlt.solve(-grad);
    }
    if (step.size() != d || !(grad.dot(step) < 0.0)) {
      step = -grad;  // fall back to steepest descent
    }

    double alpha = 1.0;
    const double slope = grad.dot(step);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      HermMat cand = ctx.basis.from_coords(c + alpha * step);
      MaxentEval cand_ev = maxent_objective(ctx, cand, true);
      if (cand_ev.admissible && cand_ev.objective <= ev.objective + 1e-4 * alpha * slope) {
        last_step = (cand.mat() - lam.mat()).norm() / std::max(lam.norm(), 1e-300);
        c += alpha * step;
        lam = cand;
        ev = cand_ev;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // line search exhausted: accept the best point found so far and let
      // the caller judge the residual
      lambda_io = lam;
      const bool good = (ctx.t_inv * (ev.omega_tilde_norm.mat() - Mat::Identity(n, n)) *
                         ctx.t_inv.adjoint())
                                .norm() /
                            ctx.sigma.norm() <=
                        ctx.opts.tol_mom;
      return {good, good ? "" : "Newton line search stalled above tolerance"};
    }
  }
  lambda_io = lam;
  return {false, "maxent iteration budget exhausted"};
}

// Fixed-point stage at prior blend t. lambda_io/p_io carry the warm start in
// and the stage result out; on failure they are left at the last accepted
// in-domain iterate of the *previous* stage (untouched).
StageOutcome fp_stage(const SolverContext& ctx, double t, const std::vector<Mat>& density,
                      HermMat& lambda_io, HermMat& p_io) {
  HermMat lam = lambda_io;
  HermMat p = p_io;
  bool warm = p.dim() == ctx.nbank.n();

  double last_step = std::numeric_limits<double>::infinity();
  double prev_resid = std::numeric_limits<double>::infinity();
  int growth_run = 0;

  for (int k = 0; k < ctx.opts.max_iter; ++k) {
    HermMat p_new;
    HermMat gam;  // moment image under the original bank
    HermMat om;   // the same image in normalized coordinates
    try {
      p_new = detail::dare_core(ctx.nbank, lam, warm ? &p : nullptr);
      SpectralFactor sf(ctx.nbank, p_new);
      std::vector<Mat> phi = phi_from_factor(sf, ctx.g_norm, density);
      gam = gamma_samples(ctx.g_orig, phi);
      om = HermMat(hermitian_part(ctx.t_fwd * gam.mat() * ctx.t_fwd.adjoint()));
    } catch (const Error& e) {
      return {false, std::string("iterate left the admissible set: ") + e.what()};
    }

    const double resid = (gam.mat() - ctx.sigma.mat()).norm() / ctx.sigma.norm();
    ctx.trace.push_back({t, k, std::isfinite(last_step) ? last_step : 0.0, resid});

    if (last_step <= ctx.opts.tol_fp) {
      if (t < 1.0 || resid <= ctx.opts.tol_mom) {
        lambda_io = lam;
        p_io = p_new;
        return {true, ""};
      }
      return {false, "fixed point converged away from the moment target"};
    }

    if (resid > prev_resid) {
      if (++growth_run >= 50) return {false, "residual grew over 50 consecutive steps"};
    } else {
      growth_run = 0;
    }
    prev_resid = resid;

    HermMat next;
    try {
      HermMat root = psd_sqrt(lam);
      next = HermMat(hermitian_part(root.mat() * om.mat() * root.mat()));
      if (ctx.opts.project_iterates) next = ctx.basis.project(next);
    } catch (const Error& e) {
      return {false, std::string("iterate left the PSD cone: ") + e.what()};
    }
    last_step = (next.mat() - lam.mat()).norm() / std::max(lam.norm(), 1e-300);
    lam = next;
    p = p_new;
    warm = true;
  }
  return {false, "stage iteration budget exhausted"};
}

}  // namespace

std::vector<Mat> phi_lambda(const FilterBank& bank, const HermMat& lambda,
                            const SpectrumInput& psi, const CircleGrid& grid) {
  if (psi.m() != bank.m()) {
    raise(ErrorCode::DimensionMismatch, "prior dimension does not match bank inputs");
  }
  SpectralFactor sf = spectral_factor(bank, lambda, grid);
  return phi_from_factor(sf, bank.evaluate_grid(grid), psi.samples(grid));
}

HermMat omega(const FilterBank& bank, const HermMat& lambda, const SpectrumInput& psi,
              const CircleGrid& grid) {
  return gamma_samples(bank.evaluate_grid(grid), phi_lambda(bank, lambda, psi, grid));
}

HermMat omega_tilde(const FilterBank& bank, const HermMat& lambda, const CircleGrid& grid) {
  const auto g_grid = bank.evaluate_grid(grid);
  std::vector<Mat> terms(g_grid.size());
  for (size_t k = 0; k < g_grid.size(); ++k) {
    const Mat& g = g_grid[k];
    Mat q = hermitian_part(g.adjoint() * lambda.mat() * g);
    Eigen::LLT<Mat> llt(q);
    if (llt.info() != Eigen::Success) {
      raise(ErrorCode::NotAdmissible, "G^* Lambda G is not positive definite on the grid");
    }
    terms[k] = g * llt.solve(g.adjoint());
  }
  Mat total = detail::pairwise_mat_sum(terms) / static_cast<double>(g_grid.size());
  return HermMat(hermitian_part(total));
}

SpectrumInput homotopy_density(const SpectrumInput& psi, double t, const CircleGrid& grid) {
  if (!(t >= 0.0 && t <= 1.0)) raise(ErrorCode::ConfigError, "blend parameter must be in [0,1]");
  if (t == 0.0) return SpectrumInput::constant(HermMat::identity(psi.m()));
  if (t == 1.0) return psi;
  if (psi.kind() == SpectrumInput::Kind::Constant) {
    const Mat c = psi.eval(0.0);
    return SpectrumInput::constant(
        HermMat(hermitian_part(t * c + (1.0 - t) * Mat::Identity(psi.m(), psi.m()))));
  }
  return SpectrumInput::grid_samples(grid, blend_samples(psi.samples(grid), t));
}

HermMat fixed_point_step(const FilterBank& bank, const HermMat& lambda,
                         const SpectrumInput& psi_t, const CircleGrid& grid,
                         const RangeGammaBasis& basis) {
  HermMat om = omega(bank, lambda, psi_t, grid);
  HermMat root = psd_sqrt(lambda);
  HermMat next(hermitian_part(root.mat() * om.mat() * root.mat()));
  next = basis.project(next);
  Admissibility adm = lambda_admissible(bank, next, grid);
  if (!adm.admissible) {
    raise(ErrorCode::NotAdmissible,
          "updated iterate has grid minimum eigenvalue " + std::to_string(adm.min_eig));
  }
  return next;
}

NormalizedProblem normalize_problem(const FilterBank& bank, const HermMat& sigma) {
  if (sigma.dim() != bank.n()) raise(ErrorCode::DimensionMismatch, "Sigma must be n x n");
  HermEig eig = eig_hermitian(sigma);
  if (!(eig.values[0] > 0.0)) {
    raise(ErrorCode::NotPD, "Sigma must be positive definite to normalize");
  }
  Eigen::VectorXd inv_sqrt = eig.values.cwiseSqrt().cwiseInverse();
  Mat t = eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.adjoint();
  Mat t_inv = eig.vectors * eig.values.cwiseSqrt().asDiagonal() * eig.vectors.adjoint();
  t = hermitian_part(t);
  t_inv = hermitian_part(t_inv);
  FilterBank nbank = FilterBank::create(t * bank.A() * t_inv, t * bank.B());
  return NormalizedProblem{std::move(nbank), std::move(t), std::move(t_inv)};
}

HermMat NormalizedProblem::back_map(const HermMat& lambda_norm) const {
  return HermMat(hermitian_part(t * lambda_norm.mat() * t));
}

namespace {

void finalize_result(const SolverContext& ctx, const NormalizedProblem& norm,
                     const SpectrumInput& psi, const HermMat& lam_norm, SolveStatus status,
                     EstimationResult& out) {
  out.status = status;
  out.lambda = norm.back_map(lam_norm);
  try {
    SpectralFactor sf(ctx.nbank, detail::dare_core(ctx.nbank, lam_norm, nullptr));
    out.phi_samples = phi_from_factor(sf, ctx.g_norm, psi.samples(ctx.grid));
    out.moment_residual = moment_residual_of(ctx, out.phi_samples);
    if (ctx.opts.refine_check && psi.evaluable_off_grid()) {
      const CircleGrid fine = ctx.grid.refined();
      std::vector<Mat> phi_fine = phi_lambda(ctx.bank, out.lambda, psi, fine);
      HermMat g_fine = gamma_samples(ctx.bank.evaluate_grid(fine), phi_fine);
      out.moment_residual_refined = (g_fine.mat() - ctx.sigma.mat()).norm() / ctx.sigma.norm();
    }
  } catch (const Error&) {
    // final iterate is not factorable; report it without density diagnostics
    out.phi_samples.clear();
  }
  if (out.status == SolveStatus::Converged) {
    const bool fine_ok = std::isnan(out.moment_residual_refined) ||
                         out.moment_residual_refined <= ctx.opts.tol_mom;
    if (!(out.moment_residual <= ctx.opts.tol_mom) || !fine_ok) {
      out.status = SolveStatus::HomotopyStuck;
    }
  }
}

}  // namespace

EstimationResult homotopy_solve(const FilterBank& bank, const HermMat& sigma,
                                const SpectrumInput& psi, const EstimationOptions& opts) {
  opts.validate();
  if (psi.m() != bank.m()) {
    raise(ErrorCode::DimensionMismatch, "prior dimension does not match bank inputs");
  }
  const CircleGrid grid(opts.grid_n);
  EstimationResult result;

  RangeGammaBasis basis_orig = RangeGammaBasis::compute(bank);
  Feasibility feas = feasibility(sigma, basis_orig);
  if (!feas.in_range || !feas.positive_definite) {
    result.status = SolveStatus::Infeasible;
    result.lambda = HermMat::zero(bank.n());
    return result;
  }

  NormalizedProblem norm = normalize_problem(bank, sigma);
  RangeGammaBasis basis = RangeGammaBasis::compute(norm.bank);
  const std::vector<Mat> g_orig = bank.evaluate_grid(grid);
  const std::vector<Mat> g_norm = norm.bank.evaluate_grid(grid);
  const std::vector<Mat> psi_samples = psi.samples(grid);

  SolverContext ctx{bank,  norm.bank, grid,  g_orig, g_norm,      basis,
                    sigma, norm.t,    norm.t_inv, opts,  result.trace};

  HermMat lam;
  StageOutcome anchor = maxent_stage(ctx, lam);
  if (!anchor.ok) {
    finalize_result(ctx, norm, psi, lam, SolveStatus::MaxIterations, result);
    return result;
  }

  const bool identity_prior =
      psi.kind() == SpectrumInput::Kind::Constant &&
      (psi.eval(0.0) - Mat::Identity(psi.m(), psi.m())).cwiseAbs().maxCoeff() == 0.0;
  if (identity_prior) {
    finalize_result(ctx, norm, psi, lam, SolveStatus::Converged, result);
    return result;
  }

  HermMat p;  // DARE warm start carried across stages
  double t = 0.0;
  double dt = opts.dt_init;
  while (t < 1.0 - 1e-15) {
    const double t_next = std::min(1.0, t + dt);
    const std::vector<Mat> density = blend_samples(psi_samples, t_next);
    HermMat lam_try = lam;
    HermMat p_try = p;
    StageOutcome stage = fp_stage(ctx, t_next, density, lam_try, p_try);
    if (stage.ok) {
      lam = lam_try;
      p = p_try;
      t = t_next;
      dt = std::min(2.0 * dt, opts.dt_init);
    } else {
      dt *= 0.5;
      if (dt < opts.dt_min) {
        finalize_result(ctx, norm, psi, lam, SolveStatus::HomotopyStuck, result);
        return result;
      }
    }
  }

  finalize_result(ctx, norm, psi, lam, SolveStatus::Converged, result);
  return result;
}

EstimationResult maxent_solve(const FilterBank& bank, const HermMat& sigma,
                              const EstimationOptions& opts) {
  return homotopy_solve(bank, sigma, SpectrumInput::constant(HermMat::identity(bank.m())), opts);
}

}  // namespace specest
