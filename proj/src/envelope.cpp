#include "hippa/envelope.hpp"

#include "hippa/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hippa {

double regularizer(const Vector& x, const Vector& y, double p, double gamma) {
  return std::pow((x - y).norm(), p) / (p * gamma);
}

double reg_objective(const Objective& phi, const Vector& x, const Vector& y, const ProxConfig& cfg) {
  if (x.size() != y.size() || x.size() != phi.dim())
    throw std::invalid_argument("reg_objective: dimension mismatch");
  const double f = phi.value(y);
  if (f == kInf) return kInf;
  return f + regularizer(x, y, cfg.p, cfg.gamma);
}

std::vector<Vector> multistart_points(const Vector& x, const ProxConfig& cfg) {
  std::vector<Vector> starts;
  starts.reserve(cfg.n_starts);
  starts.push_back(x);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_radius(std::log(1e-3), 0.0);
  const double scale = 1.0 + x.norm();
  for (int i = 1; i < cfg.n_starts; ++i) {
    Vector u(x.size());
    do {
      for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = normal(rng);
    } while (u.norm() == 0.0);
    u.normalize();
    const double r = std::exp(log_radius(rng)) * scale;
    starts.push_back(x + r * u);
  }
  return starts;
}

namespace {

struct LocalSolution {
  Vector y;
  double reg;
  double phi;
  bool from_start;
};

bool solution_less(const LocalSolution& a, const LocalSolution& b) {
  if (a.reg != b.reg) return a.reg < b.reg;
  return lex_less(a.y, b.y);
}

// Single-linkage clustering by position.
std::vector<ProxCandidate> cluster(std::vector<LocalSolution> sols, double radius) {
  const std::size_t n = sols.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((sols[i].y - sols[j].y).norm() <= radius) parent[find(i)] = find(j);

  std::vector<ProxCandidate> out;
  std::vector<std::size_t> root_to_out(n, n);
  // Visit in sorted order so each cluster's first member is its best one.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return solution_less(sols[a], sols[b]); });
  for (auto i : order) {
    const auto r = find(i);
    if (root_to_out[r] == n) {
      root_to_out[r] = out.size();
      out.push_back({sols[i].y, sols[i].reg, sols[i].phi, 0});
    }
    if (sols[i].from_start) ++out[root_to_out[r]].hits;
  }
  return out;
}

}  // namespace

ProxSolution eval_hope(const Objective& phi, const Vector& x, const ProxConfig& cfg,
                       BudgetTracker* budget) {
  cfg.validate();
  if (x.size() != phi.dim()) throw std::invalid_argument("eval_hope: dimension mismatch");

  ProxSolution sol;
  const long dim = static_cast<long>(x.size());
  auto remaining = [&] { return budget ? budget->remaining() - sol.evals : std::numeric_limits<long>::max(); };

  const double phi_x = phi.value(x);
  ++sol.evals;

  std::vector<LocalSolution> locals;
  locals.push_back({x, phi_x, phi_x, false});

  auto f = [&](const Vector& y) { return reg_objective(phi, x, y, cfg); };

  auto unbounded_at = [&](const Vector& y) {
    sol.unbounded = true;
    sol.y = y;
    sol.env_value = -kInf;
    sol.phi_y = -kInf;
    sol.residual = (x - y).norm();
    sol.grad = Vector::Zero(x.size());
    sol.multiplicity = 0;
    sol.status = SolveStatus::converged;
    if (budget) budget->charge(sol.evals);
    return sol;
  };

  std::vector<Vector> starts = multistart_points(x, cfg);
  // Coordinate probes at doubling radii; the best one below phi(x) becomes an extra start.
  {
    const double base = 1.0 + x.norm();
    double probe_best = phi_x;
    Vector probe_at;
    bool room = true;
    for (int k = 1; room && k <= cfg.escape_levels; ++k) {
      const double r = std::ldexp(base, k);
      for (Eigen::Index j = 0; room && j < x.size(); ++j) {
        for (double sgn : {1.0, -1.0}) {
          room = remaining() - 1 >= 2 * (dim + 2);
          if (!room) break;
          Vector y = x;
          y[j] += sgn * r;
          const double v = f(y);
          ++sol.evals;
          if (v < cfg.unbounded_floor) return unbounded_at(y);
          if (v < probe_best) {
            probe_best = v;
            probe_at = std::move(y);
          }
        }
      }
    }
    if (probe_at.size() > 0) starts.push_back(std::move(probe_at));
  }

  bool any_converged = false;
  bool skipped = false;
  for (const Vector& start : starts) {
    const long room = remaining() - 1;  // keep one call for phi(y)
    if (room < dim + 2 || (budget && budget->time_exhausted())) {
      skipped = true;
      break;
    }
    NelderMeadOptions opts;
    opts.tol = cfg.inner_tol;
    opts.scale = cfg.simplex_scale;
    opts.floor = cfg.unbounded_floor;
    opts.budget = std::max(std::min(cfg.inner_budget, room), dim + 2);
    NelderMeadResult r = nelder_mead(f, start, opts);
    sol.evals += r.evals;
    // Restart from the returned point while that still lowers the value;
    // a fresh simplex escapes the collapsed ones NM leaves on kinks.
    for (int k = 0; k < cfg.inner_restarts && !r.below_floor; ++k) {
      const long left = remaining() - 1;
      if (left < dim + 2) break;
      opts.budget = std::min(cfg.inner_budget, left);
      NelderMeadResult again = nelder_mead(f, r.x, opts);
      sol.evals += again.evals;
      if (again.below_floor || again.value < r.value) {
        r = std::move(again);
      } else {
        break;
      }
    }
    if (r.below_floor) return unbounded_at(r.x);
    any_converged = any_converged || r.status == SolveStatus::converged;
    const double phi_y = phi.value(r.x);
    ++sol.evals;
    locals.push_back({r.x, phi_y + regularizer(x, r.x, cfg.p, cfg.gamma), phi_y, true});
  }
  if (budget) budget->charge(sol.evals);

  sol.candidates = cluster(std::move(locals), cfg.cluster_radius);
  const ProxCandidate& best = sol.candidates.front();
  if (best.reg_value < phi_x) {
    sol.y = best.y;
    sol.env_value = best.reg_value;
    sol.phi_y = best.phi_value;
  } else {
    sol.y = x;
    sol.env_value = phi_x;
    sol.phi_y = phi_x;
    sol.safeguard_used = true;
  }
  const double tie = cfg.value_tie_tol * (1.0 + std::abs(sol.env_value));
  sol.multiplicity = static_cast<int>(std::count_if(
      sol.candidates.begin(), sol.candidates.end(),
      [&](const ProxCandidate& c) { return c.reg_value <= sol.env_value + tie; }));
  sol.multiplicity = std::max(sol.multiplicity, 1);
  sol.residual = (x - sol.y).norm();
  sol.grad = home_gradient(x, sol.y, cfg);
  sol.status = (any_converged || sol.safeguard_used) ? SolveStatus::converged
                                                     : SolveStatus::budget_exhausted;
  sol.starts_skipped = skipped;
  return sol;
}

double eval_home(const Objective& phi, const Vector& x, const ProxConfig& cfg) {
  return eval_hope(phi, x, cfg).env_value;
}

Vector home_gradient(const Vector& x, const Vector& y, const ProxConfig& cfg) {
  const Vector d = x - y;
  const double n = d.norm();
  if (n == 0.0) return Vector::Zero(x.size());
  return std::pow(n, cfg.p - 2.0) * d / cfg.gamma;
}

Vector prox_from_gradient(const Vector& x, const Vector& g, const ProxConfig& cfg) {
  const double n = g.norm();
  if (n == 0.0) return x;
  const double q = 1.0 / (cfg.p - 1.0);
  return x - std::pow(cfg.gamma, q) * std::pow(n, (2.0 - cfg.p) * q) * g;
}

}  // namespace hippa
