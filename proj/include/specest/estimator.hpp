#pragma once

#include <limits>
#include <vector>

#include "specest/moment_map.hpp"
#include "specest/riccati.hpp"

namespace specest {

struct EstimationOptions {
  int grid_n = CircleGrid::kDefaultSize;
  double tol_fp = 1e-9;    // relative iterate increment
  double tol_mom = 1e-6;   // relative moment residual
  int max_iter = 5000;     // per stage
  double dt_init = 0.1;
  double dt_min = 1e-4;
  double admissibility_margin = 0.0;
  bool project_iterates = true;
  bool refine_check = true;  // re-verify converged moments on a 2x finer grid

  void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, HomotopyStuck, Infeasible };

const char* to_string(SolveStatus status);

struct TraceRecord {
  double t = 0.0;
  int k = 0;
  double step_norm = 0.0;
  double residual = 0.0;
};

struct EstimationResult {
  HermMat lambda;
  double moment_residual = std::numeric_limits<double>::infinity();
  // residual re-checked on the doubled grid; NaN when the prior is pinned to
  // the solve grid and cannot be evaluated elsewhere
  double moment_residual_refined = std::numeric_limits<double>::quiet_NaN();
  std::vector<Mat> phi_samples;  // solution density on the solve grid
  std::vector<TraceRecord> trace;
  SolveStatus status = SolveStatus::Infeasible;
};

/// Candidate solution density: W^{-1} Psi W^{-*} sampled on the grid.
std::vector<Mat> phi_lambda(const FilterBank& bank, const HermMat& lambda,
                            const SpectrumInput& psi, const CircleGrid& grid);

/// Moment image of the candidate density (gamma composed with phi_lambda).
HermMat omega(const FilterBank& bank, const HermMat& lambda, const SpectrumInput& psi,
              const CircleGrid& grid);

/// Identity-prior moment map: the grid average of G (G^* Lambda G)^{-1} G^*,
/// computed by direct pointwise inversion (no spectral factor involved).
HermMat omega_tilde(const FilterBank& bank, const HermMat& lambda, const CircleGrid& grid);

/// The prior blend t Psi + (1-t) I, as a density usable anywhere a prior is.
SpectrumInput homotopy_density(const SpectrumInput& psi, double t, const CircleGrid& grid);

/// One iteration of the moment-matching fixed point for the normalized
/// (Sigma = I) problem:
///   Lambda_{k+1} = Lambda_k^{1/2} omega(Lambda_k) Lambda_k^{1/2},
/// followed by projection onto the range of the moment map and an
/// admissibility re-check (NotAdmissible when the iterate left the domain).
HermMat fixed_point_step(const FilterBank& bank, const HermMat& lambda,
                         const SpectrumInput& psi_t, const CircleGrid& grid,
                         const RangeGammaBasis& basis);

/// State congruence absorbing Sigma into the bank: with T = Sigma^{-1/2} the
/// transformed bank (TAT^{-1}, TB) turns the constraint into Gamma'(Phi) = I.
struct NormalizedProblem {
  FilterBank bank;
  Mat t;      // Sigma^{-1/2}
  Mat t_inv;  // Sigma^{1/2}

  /// Convert a multiplier of the normalized problem back: Lambda = T Lambda' T.
  HermMat back_map(const HermMat& lambda_norm) const;
};

NormalizedProblem normalize_problem(const FilterBank& bank, const HermMat& sigma);

/// Identity-prior solve (the homotopy anchor): damped Newton on the convex
/// dual J(Lambda) = <Lambda, Sigma> - int log det G^* Lambda G, whose
/// stationary point satisfies omega_tilde(Lambda) = Sigma.
EstimationResult maxent_solve(const FilterBank& bank, const HermMat& sigma,
                              const EstimationOptions& opts = {});

/// Full solve: anchor at the identity prior, then track the prior blend from
/// t = 0 to t = 1 with warm-started fixed-point stages and step halving.
EstimationResult homotopy_solve(const FilterBank& bank, const HermMat& sigma,
                                const SpectrumInput& psi, const EstimationOptions& opts = {});

}  // namespace specest
