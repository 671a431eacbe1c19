#include "hippa/baselines.hpp"

#include "hippa/nelder_mead.hpp"

#include <cmath>

namespace hippa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_subgrad(const Objective& phi, const char* who) {
  if (!phi.has_subgrad())
    throw std::logic_error(std::string(who) + ": objective '" + phi.name() + "' has no subgradient oracle");
}

}  // namespace

BaselineRun run_sg_dss(const Objective& phi, const Vector& x0, double alpha, long max_iter,
                       RunLimits limits) {
  require_subgrad(phi, "run_sg_dss");
  if (!(alpha > 0.0)) throw std::invalid_argument("run_sg_dss: alpha must be > 0");

  BudgetTracker budget(limits);
  BaselineRun run;
  Vector x = x0;
  const double f0 = phi.value(x);
  budget.charge(1);
  run.trace.push(x, f0, kNaN, budget.used(), budget.seconds());

  for (long k = 1; k <= max_iter; ++k) {
    if (budget.remaining() < 2 || budget.time_exhausted()) break;
    const Vector zeta = phi.subgrad(x);
    x -= (alpha / std::sqrt(static_cast<double>(k))) * zeta;
    const double fx = phi.value(x);
    budget.charge(2);
    ++run.iterations;
    run.trace.push(x, fx, kNaN, budget.used(), budget.seconds());
  }
  run.evals = budget.used();
  return run;
}

BaselineRun run_sg_gss(const Objective& phi, const Vector& x0, double rho, long max_iter,
                       RunLimits limits) {
  require_subgrad(phi, "run_sg_gss");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("run_sg_gss: rho must lie in (0, 1)");

  BudgetTracker budget(limits);
  BaselineRun run;
  Vector x = x0;
  const double f0 = phi.value(x);
  budget.charge(1);
  run.trace.push(x, f0, kNaN, budget.used(), budget.seconds());

  double step = 1.0;  // rho^k, k = 0, 1, ...
  for (long k = 0; k < max_iter; ++k) {
    if (budget.remaining() < 2 || budget.time_exhausted()) break;
    const Vector zeta = phi.subgrad(x);
    budget.charge(1);
    const double n = zeta.norm();
    if (n == 0.0) {
      run.status = SolveStatus::converged;
      break;
    }
    x -= step * zeta / n;
    step *= rho;
    const double fx = phi.value(x);
    budget.charge(1);
    ++run.iterations;
    run.trace.push(x, fx, kNaN, budget.used(), budget.seconds());
  }
  run.evals = budget.used();
  return run;
}

BaselineRun run_nm_direct(const Objective& phi, const Vector& x0, double tol, long budget,
                          RunLimits limits) {
  BudgetTracker clock(limits);
  BaselineRun run;
  long evals = 0;
  double f0 = kNaN;
  auto f = [&](const Vector& x) {
    const double v = phi.value(x);
    if (evals++ == 0) f0 = v;
    return v;
  };

  NelderMeadOptions opts;
  opts.tol = tol;
  opts.budget = budget;
  if (limits.eval_budget > 0) opts.budget = std::min(opts.budget, limits.eval_budget);
  // The first call shows the initial simplex; later ones follow completed iterations.
  bool initial = true;
  opts.observer = [&](const SimplexState& s) {
    if (initial) {
      run.trace.push(x0, f0, kNaN, 1, clock.seconds());
      initial = false;
      return;
    }
    run.trace.push(s.vertices.front(), s.values.front(), kNaN, evals, clock.seconds());
  };
  if (limits.wallclock_seconds > 0.0) opts.should_stop = [&] { return clock.time_exhausted(); };

  const NelderMeadResult r = nelder_mead(f, x0, opts);
  if (run.trace.size() == 0) run.trace.push(x0, f0, kNaN, 1, clock.seconds());
  if (r.x != run.trace.iterates.back()) run.trace.push(r.x, r.value, kNaN, evals, clock.seconds());
  run.status = r.status;
  run.iterations = static_cast<long>(run.trace.size()) - 1;
  run.evals = evals;
  return run;
}

}  // namespace hippa
