#ifndef HIPPA_HIPPA_HPP
#define HIPPA_HIPPA_HPP

#include "hippa/core.hpp"

#include <optional>
#include <stdexcept>

namespace hippa {

enum class StopReason { step_tol, budget, wallclock };

const char* to_string(StopReason r);

/// Raised when an envelope evaluation is unbounded below (phi is not
/// prox-bounded at this gamma).
class UnboundedEnvelopeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct HippaResult {
  Trace trace;
  Vector x_final;
  StopReason stop_reason = StopReason::budget;
  long iterations = 0;
  long evals = 0;
  double last_step = 0.0;
  /// p gamma (phi(x0) - phi*) / eps^p; empty when phi* is unknown.
  std::optional<double> iter_bound;
  /// (1/gamma) |x^k - x^{k+1}|^{p-1} for the final step.
  double criticality = 0.0;
  /// eps^{p-1} / gamma.
  double criticality_bound = 0.0;
};

/// High-order proximal-point iteration x^{k+1} = prox(x^k), stopped when
/// |x^k - x^{k+1}| <= eps, after max_iter steps, or when `limits` run out.
///
/// A step is accepted only if its regularized value does not exceed phi(x^k).
/// When the prox solve cannot improve on x^k it is retried once with twice
/// as many starts; if that also fails x^k is kept and the run stops.
///
/// Throws UnboundedEnvelopeError if the envelope is -inf at an iterate and
/// std::invalid_argument if eps <= 0 or phi(x0) is not finite.
HippaResult run_hippa(const Objective& phi, const Vector& x0, const ProxConfig& cfg, double eps,
                      long max_iter, RunLimits limits = {});

struct ChainCheck {
  bool f_nonincreasing = true;    // phi(x^{k+1}) <= phi(x^k)
  bool env_nonincreasing = true;  // env(x^{k+1}) <= env(x^k) where both are known
  bool sandwich = true;           // phi(x^{k+1}) <= env(x^k) <= phi(x^k)
  double worst = 0.0;             // largest violation amount seen (0 if none)

  bool ok() const { return f_nonincreasing && env_nonincreasing && sandwich; }
};

/// Checks the descent chains of a HiPPA trace with absolute tolerance tol.
/// NaN envelope entries are skipped.
ChainCheck check_monotonicity(const Trace& trace, double tol = 1e-9);

/// sum_k |x^{k+1} - x^k|^p <= p gamma (phi(x0) - min_k phi(x^k)) + tol.
bool summability_holds(const Trace& trace, double p, double gamma, double tol = 1e-6);

/// Worst-case iteration count p gamma (f0 - fstar) / eps^p.
double iteration_bound(double p, double gamma, double f0, double fstar, double eps);

/// Bound eps^{p-1} / gamma on dist(0, subdifferential) at the returned point.
double criticality_bound(double eps, const ProxConfig& cfg);

}  // namespace hippa

#endif  // HIPPA_HIPPA_HPP
