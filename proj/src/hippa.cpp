#include "hippa/hippa.hpp"

#include "hippa/envelope.hpp"

#include <algorithm>
#include <cmath>

namespace hippa {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::step_tol: return "step_tol";
    case StopReason::budget: return "budget";
    case StopReason::wallclock: return "wallclock";
  }
  return "unknown";
}

double iteration_bound(double p, double gamma, double f0, double fstar, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("iteration_bound: eps must be > 0");
  if (f0 < fstar) throw std::invalid_argument("iteration_bound: f0 < fstar");
  return p * gamma * (f0 - fstar) / std::pow(eps, p);
}

double criticality_bound(double eps, const ProxConfig& cfg) {
  if (!(eps > 0.0)) throw std::invalid_argument("criticality_bound: eps must be > 0");
  return std::pow(eps, cfg.p - 1.0) / cfg.gamma;
}

ChainCheck check_monotonicity(const Trace& trace, double tol) {
  ChainCheck c;
  auto note = [&](bool& flag, double excess) {
    if (excess > tol) {
      flag = false;
      c.worst = std::max(c.worst, excess);
    }
  };
  const auto& f = trace.f_values;
  const auto& e = trace.env_values;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    note(c.f_nonincreasing, f[k + 1] - f[k]);
    if (!std::isnan(e[k])) {
      note(c.sandwich, f[k + 1] - e[k]);
      note(c.sandwich, e[k] - f[k]);
      if (!std::isnan(e[k + 1])) note(c.env_nonincreasing, e[k + 1] - e[k]);
    }
  }
  if (!e.empty() && !std::isnan(e.back())) note(c.sandwich, e.back() - f.back());
  return c;
}

bool summability_holds(const Trace& trace, double p, double gamma, double tol) {
  if (trace.size() == 0) return true;
  double sum = 0.0;
  for (double s : trace.step_norms) sum += std::pow(s, p);
  const double fmin = *std::min_element(trace.f_values.begin(), trace.f_values.end());
  return sum <= p * gamma * (trace.f_values.front() - fmin) + tol;
}

HippaResult run_hippa(const Objective& phi, const Vector& x0, const ProxConfig& cfg, double eps,
                      long max_iter, RunLimits limits) {
  cfg.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("run_hippa: eps must be > 0");
  if (max_iter < 1) throw std::invalid_argument("run_hippa: max_iter must be >= 1");

  BudgetTracker budget(limits);
  const double f0 = phi.value(x0);
  budget.charge(1);
  if (!std::isfinite(f0)) throw std::invalid_argument("run_hippa: phi(x0) must be finite");

  HippaResult res;
  res.criticality_bound = criticality_bound(eps, cfg);
  if (phi.fmin()) res.iter_bound = iteration_bound(cfg.p, cfg.gamma, f0, *phi.fmin(), eps);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  Vector x = x0;
  double fx = f0;
  res.trace.push(x, fx, nan, budget.used(), budget.seconds());

  auto solve = [&](const Vector& at, long k, int starts_factor) {
    ProxConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(k);
    c.n_starts = cfg.n_starts * starts_factor;
    ProxSolution s = eval_hope(phi, at, c, &budget);
    if (s.unbounded)
      throw UnboundedEnvelopeError("run_hippa: envelope is -inf at iterate " + std::to_string(k) +
                                   "; '" + phi.name() + "' is not prox-bounded at this gamma");
    return s;
  };

  bool closed = false;  // final env value already known
  for (;;) {
    if (res.iterations >= max_iter || budget.evals_exhausted()) {
      res.stop_reason = StopReason::budget;
      break;
    }
    if (budget.time_exhausted()) {
      res.stop_reason = StopReason::wallclock;
      break;
    }
    const long k = res.iterations;
    ProxSolution s = solve(x, k, 1);
    if (s.safeguard_used && !s.starts_skipped && !budget.evals_exhausted()) {
      ProxSolution retry = solve(x, k, 2);
      if (!retry.safeguard_used) s = std::move(retry);
    }
    // x^{k+1} is accepted only when reg(x^k, x^{k+1}) <= phi(x^k).
    if (!(s.env_value <= fx)) {
      s.y = x;
      s.env_value = fx;
      s.phi_y = fx;
    }
    res.trace.env_values.back() = s.env_value;
    const double step = (x - s.y).norm();
    if (s.safeguard_used && s.starts_skipped && step == 0.0) {
      // Budget ran out before any start could be solved: not a fixed point.
      res.stop_reason = budget.time_exhausted() ? StopReason::wallclock : StopReason::budget;
      break;
    }
    ++res.iterations;
    res.last_step = step;
    x = s.y;
    fx = s.phi_y;
    res.trace.push(x, fx, nan, budget.used(), budget.seconds());
    if (step <= eps) {
      res.stop_reason = StopReason::step_tol;
      if (step == 0.0) {
        res.trace.env_values.back() = s.env_value;
        closed = true;
      }
      break;
    }
  }

  if (!closed && res.iterations > 0 && !budget.evals_exhausted() && !budget.time_exhausted()) {
    const ProxSolution s = solve(x, res.iterations, 1);
    if (!s.starts_skipped || !s.safeguard_used)
      res.trace.env_values.back() = std::min(s.env_value, fx);
  }

  res.x_final = x;
  res.evals = budget.used();
  res.criticality = res.iterations > 0 ? std::pow(res.last_step, cfg.p - 1.0) / cfg.gamma : nan;
  return res;
}

}  // namespace hippa
