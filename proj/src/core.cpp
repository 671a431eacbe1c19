#include "hippa/core.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace hippa {

Objective::Objective(std::string name, int dim, ValueFn value, SubgradFn subgrad)
    : name_(std::move(name)), dim_(dim), value_(std::move(value)), subgrad_(std::move(subgrad)) {
  if (dim_ < 1) throw std::invalid_argument("Objective: dim must be positive");
  if (!value_) throw std::invalid_argument("Objective: value oracle required");
}

void Objective::check_dim(const Vector& x) const {
  if (x.size() != dim_) {
    std::ostringstream os;
    os << "Objective '" << name_ << "': expected dimension " << dim_ << ", got " << x.size();
    throw std::invalid_argument(os.str());
  }
}

double Objective::value(const Vector& x) const {
  check_dim(x);
  const double v = value_(x);
  return std::isnan(v) ? kInf : v;
}

Vector Objective::subgrad(const Vector& x) const {
  if (!subgrad_) throw std::logic_error("Objective '" + name_ + "' has no subgradient oracle");
  check_dim(x);
  return subgrad_(x);
}

Objective Objective::with_minimizer(Vector xstar, double fmin) const {
  check_dim(xstar);
  if (std::abs(value_(xstar) - fmin) > 1e-12)
    throw std::invalid_argument("Objective '" + name_ + "': value(xstar) != fmin");
  Objective out = *this;
  out.xstar_ = std::move(xstar);
  out.fmin_ = fmin;
  return out;
}

Objective Objective::with_critical_point(Vector point) const {
  check_dim(point);
  Objective out = *this;
  out.other_critical_.push_back(std::move(point));
  return out;
}

void ProxConfig::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("ProxConfig: p must be > 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("ProxConfig: gamma must be > 0");
  if (inner_budget < 1) throw std::invalid_argument("ProxConfig: inner_budget must be >= 1");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("ProxConfig: inner_tol must be > 0");
  if (n_starts < 1) throw std::invalid_argument("ProxConfig: n_starts must be >= 1");
  if (!(cluster_radius > 0.0)) throw std::invalid_argument("ProxConfig: cluster_radius must be > 0");
  if (inner_restarts < 0) throw std::invalid_argument("ProxConfig: inner_restarts must be >= 0");
  if (escape_levels < 0) throw std::invalid_argument("ProxConfig: escape_levels must be >= 0");
  if (!(simplex_scale > 0.0)) throw std::invalid_argument("ProxConfig: simplex_scale must be > 0");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

bool Trace::consistent() const {
  const std::size_t n = iterates.size();
  return f_values.size() == n && env_values.size() == n && eval_counts.size() == n &&
         elapsed.size() == n && step_norms.size() + 1 == std::max<std::size_t>(n, 1);
}

void Trace::push(const Vector& x, double f, double env, long evals, double seconds) {
  if (!iterates.empty()) step_norms.push_back((x - iterates.back()).norm());
  iterates.push_back(x);
  f_values.push_back(f);
  env_values.push_back(env);
  eval_counts.push_back(evals);
  elapsed.push_back(seconds);
}

BudgetTracker::BudgetTracker(RunLimits limits)
    : limits_(limits), start_(std::chrono::steady_clock::now()) {}

long BudgetTracker::remaining() const {
  if (limits_.eval_budget <= 0) return std::numeric_limits<long>::max() / 4;
  return std::max(0L, limits_.eval_budget - used_);
}

double BudgetTracker::seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

bool BudgetTracker::time_exhausted() const {
  return limits_.wallclock_seconds > 0.0 && seconds() >= limits_.wallclock_seconds;
}

bool lex_less(const Vector& a, const Vector& b) {
  const auto n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return a.size() < b.size();
}

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec1(double a) { return Vector::Constant(1, a); }

}  // namespace

Objective make_ncr1() {
  auto value = [](const Vector& x) {
    const double u = x[1] - 2.0 * x[0] * x[0] + 1.0;
    return 0.25 * (x[0] - 1.0) * (x[0] - 1.0) + std::abs(u);
  };
  auto subgrad = [](const Vector& x) {
    const double s = sign0(x[1] - 2.0 * x[0] * x[0] + 1.0);
    return vec2(0.5 * (x[0] - 1.0) - 4.0 * x[0] * s, s);
  };
  return Objective("ncr1", 2, value, subgrad).with_minimizer(vec2(1.0, 1.0), 0.0);
}

Objective make_ncr2() {
  auto value = [](const Vector& x) {
    return 0.25 * std::abs(x[0] - 1.0) + std::abs(x[1] - 2.0 * std::abs(x[0]) + 1.0);
  };
  auto subgrad = [](const Vector& x) {
    const double s = sign0(x[1] - 2.0 * std::abs(x[0]) + 1.0);
    return vec2(0.25 * sign0(x[0] - 1.0) - 2.0 * sign0(x[0]) * s, s);
  };
  return Objective("ncr2", 2, value, subgrad)
      .with_minimizer(vec2(1.0, 1.0), 0.0)
      .with_critical_point(vec2(0.0, -1.0));
}

Objective make_quartic() {
  auto value = [](const Vector& x) {
    const double t2 = x[0] * x[0];
    return t2 * t2 - t2;
  };
  auto grad = [](const Vector& x) { return vec1(4.0 * x[0] * x[0] * x[0] - 2.0 * x[0]); };
  const double r = 1.0 / std::sqrt(2.0);
  return Objective("quartic", 1, value, grad).with_minimizer(vec1(r), r * r * r * r - r * r);
}

Objective make_abs_shift() {
  auto value = [](const Vector& x) { return std::abs(x[0] - 2.0); };
  auto subgrad = [](const Vector& x) { return vec1(sign0(x[0] - 2.0)); };
  return Objective("abs_shift", 1, value, subgrad).with_minimizer(vec1(2.0), 0.0);
}

Objective make_notcalm() {
  auto value = [](const Vector& x) {
    const double a = std::abs(x[0]);
    return a <= 1.0 ? -a : a - 2.0;
  };
  auto subgrad = [](const Vector& x) {
    const double s = sign0(x[0]);
    return vec1(std::abs(x[0]) <= 1.0 ? -s : s);
  };
  // Global minimizers are +-1 with value -1; record one of them.
  return Objective("notcalm", 1, value, subgrad).with_minimizer(vec1(1.0), -1.0);
}

Objective make_negexp() {
  auto value = [](const Vector& x) { return -std::exp(x[0] * x[0]); };
  auto grad = [](const Vector& x) { return vec1(-2.0 * x[0] * std::exp(x[0] * x[0])); };
  return Objective("negexp", 1, value, grad);
}

std::vector<std::string> objective_ids() {
  return {"ncr1", "ncr2", "quartic", "abs_shift", "notcalm", "negexp"};
}

Objective objective_by_id(const std::string& id) {
  if (id == "ncr1") return make_ncr1();
  if (id == "ncr2") return make_ncr2();
  if (id == "quartic") return make_quartic();
  if (id == "abs_shift") return make_abs_shift();
  if (id == "notcalm") return make_notcalm();
  if (id == "negexp") return make_negexp();
  throw std::invalid_argument("unknown objective id '" + id + "'");
}

}  // namespace hippa
