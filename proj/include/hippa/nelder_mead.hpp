#ifndef HIPPA_NELDER_MEAD_HPP
#define HIPPA_NELDER_MEAD_HPP

#include "hippa/core.hpp"

#include <functional>
#include <vector>

namespace hippa {

using ScalarFn = std::function<double(const Vector&)>;

/// Simplex of dim+1 vertices kept sorted by value (ties broken
/// lexicographically on coordinates).
struct SimplexState {
  std::vector<Vector> vertices;
  std::vector<double> values;
  double diameter = 0.0;  // max pairwise vertex distance
  long evals = 0;

  void sort();
  void update_diameter();
};

/// Vertex 0 is x0; vertex i is x0 + s_i * scale * max(1, |x0_i|) * e_i,
/// where s_i is -1 for negative x0_i and +1 otherwise.
/// Values are left unset (NaN) and evals at 0.
SimplexState initial_simplex(const Vector& x0, double scale);

struct NelderMeadOptions {
  double tol = 1e-10;     // diameter tolerance
  double ftol = -1.0;     // value-spread tolerance; negative means tol^2
  long budget = 4000;     // max evaluations, >= dim + 2
  double scale = 0.05;    // initial simplex scale
  double floor = -kInf;   // stop as soon as a value drops below this
  /// Called after every iteration with the sorted simplex.
  std::function<void(const SimplexState&)> observer;
  /// Checked once per iteration; returning true ends the solve as
  /// budget_exhausted (used for wall-clock limits).
  std::function<bool()> should_stop;
};

struct NelderMeadResult {
  Vector x;
  double value = kInf;
  SolveStatus status = SolveStatus::budget_exhausted;
  long evals = 0;
  long iterations = 0;
  bool below_floor = false;
};

/// Nelder-Mead with reflection/expansion/contraction/shrink coefficients
/// 1, 2, 1/2, 1/2 and the Lagarias et al. acceptance rules. Converged when the
/// simplex diameter is <= tol or the value spread is <= ftol * (1 + |best|).
/// Throws std::invalid_argument on tol <= 0 or budget < dim + 2.
NelderMeadResult nelder_mead(const ScalarFn& f, const Vector& x0, const NelderMeadOptions& opts);

inline NelderMeadResult nelder_mead(const ScalarFn& f, const Vector& x0, double tol, long budget) {
  NelderMeadOptions opts;
  opts.tol = tol;
  opts.budget = budget;
  return nelder_mead(f, x0, opts);
}

}  // namespace hippa

#endif  // HIPPA_NELDER_MEAD_HPP
