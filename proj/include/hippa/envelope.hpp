#ifndef HIPPA_ENVELOPE_HPP
#define HIPPA_ENVELOPE_HPP

#include "hippa/core.hpp"

#include <vector>

namespace hippa {

/// |x - y|^p / (p gamma).
double regularizer(const Vector& x, const Vector& y, double p, double gamma);

/// phi(y) + |x - y|^p / (p gamma). +inf propagates; throws
/// std::invalid_argument when x, y and phi disagree in dimension.
double reg_objective(const Objective& phi, const Vector& x, const Vector& y, const ProxConfig& cfg);

/// Start points for the inner solves: x itself, then x + r u_i with u_i
/// uniform on the unit sphere and r log-uniform in [1e-3, 1] * (1 + |x|).
/// Deterministic in cfg.seed.
std::vector<Vector> multistart_points(const Vector& x, const ProxConfig& cfg);

/// High-order proximal operator at x.
///
/// Runs cfg.n_starts Nelder-Mead solves of y -> reg_objective(phi, x, y),
/// plus one from the best of the coordinate probes x +- (1 + |x|) 2^k e_j
/// when that probe lies below phi(x),
/// each restarted up to cfg.inner_restarts times from its result while that
/// keeps lowering the value,
/// clusters the local solutions by single linkage with cfg.cluster_radius,
/// and returns the best cluster representative together with the full list.
/// y = x is always a candidate, so the returned envelope value never exceeds
/// phi(x). When any inner value drops below cfg.unbounded_floor the result is
/// flagged unbounded and env_value is -inf.
///
/// Every oracle call is charged to `budget` when one is given; starts that no
/// longer fit in the remaining budget are skipped.
ProxSolution eval_hope(const Objective& phi, const Vector& x, const ProxConfig& cfg,
                       BudgetTracker* budget = nullptr);

/// Envelope value at x; -inf when unbounded below.
double eval_home(const Objective& phi, const Vector& x, const ProxConfig& cfg);

/// (1/gamma)|x - y|^{p-2}(x - y), zero when x == y.
Vector home_gradient(const Vector& x, const Vector& y, const ProxConfig& cfg);

/// Inverse of home_gradient in y: x - gamma^{1/(p-1)} |g|^{(2-p)/(p-1)} g.
Vector prox_from_gradient(const Vector& x, const Vector& g, const ProxConfig& cfg);

}  // namespace hippa

#endif  // HIPPA_ENVELOPE_HPP
