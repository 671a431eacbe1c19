#include "hippa/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hippa {

void SimplexState::sort() {
  std::vector<std::size_t> idx(vertices.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return lex_less(vertices[a], vertices[b]);
  });
  std::vector<Vector> v2;
  std::vector<double> f2;
  v2.reserve(idx.size());
  f2.reserve(idx.size());
  for (auto i : idx) {
    v2.push_back(std::move(vertices[i]));
    f2.push_back(values[i]);
  }
  vertices = std::move(v2);
  values = std::move(f2);
}

void SimplexState::update_diameter() {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      d = std::max(d, (vertices[i] - vertices[j]).norm());
  diameter = d;
}

SimplexState initial_simplex(const Vector& x0, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("initial_simplex: scale must be > 0");
  const auto n = x0.size();
  SimplexState s;
  s.vertices.reserve(n + 1);
  s.vertices.push_back(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector v = x0;
    v[i] += (x0[i] < 0.0 ? -scale : scale) * std::max(1.0, std::abs(x0[i]));
    s.vertices.push_back(std::move(v));
  }
  s.values.assign(n + 1, std::numeric_limits<double>::quiet_NaN());
  s.update_diameter();
  return s;
}

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct BudgetExhausted {};
struct FloorReached {};

}  // namespace

NelderMeadResult nelder_mead(const ScalarFn& f, const Vector& x0, const NelderMeadOptions& opts) {
  const auto n = x0.size();
  if (n < 1) throw std::invalid_argument("nelder_mead: empty start point");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("nelder_mead: tol must be > 0");
  if (opts.budget < n + 2) throw std::invalid_argument("nelder_mead: budget must be >= dim + 2");
  const double ftol = opts.ftol < 0.0 ? opts.tol * opts.tol : opts.ftol;

  SimplexState s = initial_simplex(x0, opts.scale);
  NelderMeadResult res;

  auto eval = [&](const Vector& x) {
    if (s.evals >= opts.budget) throw BudgetExhausted{};
    ++s.evals;
    double v = f(x);
    if (std::isnan(v)) v = kInf;
    if (v < opts.floor) {
      res.x = x;
      res.value = v;
      throw FloorReached{};
    }
    return v;
  };

  auto finish = [&](SolveStatus status) {
    s.sort();
    res.x = s.vertices.front();
    res.value = s.values.front();
    res.status = status;
    res.evals = s.evals;
    return res;
  };

  try {
    for (Eigen::Index i = 0; i <= n; ++i) s.values[i] = eval(s.vertices[i]);
  } catch (const BudgetExhausted&) {
    // Cannot happen: budget >= n + 2.
    return finish(SolveStatus::budget_exhausted);
  } catch (const FloorReached&) {
    res.below_floor = true;
    res.evals = s.evals;
    res.status = SolveStatus::converged;
    return res;
  }

  try {
    for (;;) {
      s.sort();
      s.update_diameter();
      if (opts.observer) opts.observer(s);
      const double best = s.values.front();
      const double spread = s.values.back() - best;
      if (s.diameter <= opts.tol) return finish(SolveStatus::converged);
      const double flat = ftol * (1.0 + std::abs(best));
      if (std::isfinite(best) && spread <= flat) {
        // A flat simplex can straddle a minimum; only stop if its centroid is no better.
        Vector c = Vector::Zero(n);
        for (const auto& v : s.vertices) c += v;
        c /= static_cast<double>(n + 1);
        if (!(eval(c) < best - flat)) return finish(SolveStatus::converged);
      }
      if (opts.should_stop && opts.should_stop()) return finish(SolveStatus::budget_exhausted);

      ++res.iterations;
      Vector centroid = Vector::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) centroid += s.vertices[i];
      centroid /= static_cast<double>(n);

      Vector& worst = s.vertices[n];
      const double f_worst = s.values[n];
      const double f_second = s.values[n - 1];

      const Vector xr = centroid + kReflect * (centroid - worst);
      const double fr = eval(xr);

      if (fr < best) {
        const Vector xe = centroid + kExpand * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          worst = xe;
          s.values[n] = fe;
        } else {
          worst = xr;
          s.values[n] = fr;
        }
        continue;
      }
      if (fr < f_second) {
        worst = xr;
        s.values[n] = fr;
        continue;
      }

      bool accepted = false;
      if (fr < f_worst) {
        const Vector xc = centroid + kContract * (xr - centroid);
        const double fc = eval(xc);
        if (fc <= fr) {
          worst = xc;
          s.values[n] = fc;
          accepted = true;
        }
      } else {
        const Vector xcc = centroid + kContract * (worst - centroid);
        const double fcc = eval(xcc);
        if (fcc < f_worst) {
          worst = xcc;
          s.values[n] = fcc;
          accepted = true;
        }
      }
      if (!accepted) {
        for (Eigen::Index i = 1; i <= n; ++i) {
          Vector v = s.vertices[0] + kShrink * (s.vertices[i] - s.vertices[0]);
          s.values[i] = eval(v);
          s.vertices[i] = std::move(v);
        }
      }
    }
  } catch (const BudgetExhausted&) {
    return finish(SolveStatus::budget_exhausted);
  } catch (const FloorReached&) {
    res.below_floor = true;
    res.evals = s.evals;
    res.status = SolveStatus::converged;
    return res;
  }
}

}  // namespace hippa
