#ifndef HIPPA_BASELINES_HPP
#define HIPPA_BASELINES_HPP

#include "hippa/core.hpp"

namespace hippa {

struct BaselineRun {
  Trace trace;
  SolveStatus status = SolveStatus::budget_exhausted;
  long iterations = 0;
  long evals = 0;

  const Vector& x_final() const { return trace.iterates.back(); }
};

// Value and subgradient calls each count as one oracle evaluation.

/// Subgradient method x^{k+1} = x^k - (alpha / sqrt(k)) zeta_k, k = 1, 2, ...
/// Throws std::logic_error if phi has no subgradient oracle.
BaselineRun run_sg_dss(const Objective& phi, const Vector& x0, double alpha, long max_iter,
                       RunLimits limits = {});

/// Normalized subgradient method x^{k+1} = x^k - rho^k zeta_k / |zeta_k|,
/// k = 0, 1, ...; stops when zeta_k = 0.
BaselineRun run_sg_gss(const Objective& phi, const Vector& x0, double rho, long max_iter,
                       RunLimits limits = {});

/// Nelder-Mead applied to phi itself. The trace records x0 and then the best
/// vertex after every completed iteration (plus the returned point if an
/// interrupted iteration improved it); iterations = trace rows - 1.
BaselineRun run_nm_direct(const Objective& phi, const Vector& x0, double tol, long budget,
                          RunLimits limits = {});

}  // namespace hippa

#endif  // HIPPA_BASELINES_HPP
