#ifndef HIPPA_CORE_HPP
#define HIPPA_CORE_HPP

#include <Eigen/Core>

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hippa {

using Vector = Eigen::VectorXd;

/// Extended-real +infinity. Objectives return it outside their domain.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// sign(t) with sign(0) = 0.
inline double sign0(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

/// Black-box objective phi: R^dim -> R u {+inf}.
///
/// Holds a value oracle, an optional oracle returning one element of the
/// limiting subdifferential, and optional minimizer metadata. Immutable once
/// built, so concurrent evaluation from several threads is safe as long as
/// the wrapped callables are pure.
class Objective {
public:
  using ValueFn = std::function<double(const Vector&)>;
  using SubgradFn = std::function<Vector(const Vector&)>;

  Objective(std::string name, int dim, ValueFn value, SubgradFn subgrad = {});

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  /// phi(x). NaN is mapped to +inf. Throws std::invalid_argument on a
  /// dimension mismatch.
  double value(const Vector& x) const;
  double operator()(const Vector& x) const { return value(x); }

  bool has_subgrad() const { return static_cast<bool>(subgrad_); }
  /// One subgradient element; throws std::logic_error if no oracle is set.
  Vector subgrad(const Vector& x) const;

  const std::optional<double>& fmin() const { return fmin_; }
  const std::optional<Vector>& xstar() const { return xstar_; }
  /// Known critical points that are not minimizers (metadata only).
  const std::vector<Vector>& other_critical_points() const { return other_critical_; }

  /// Attach a known global minimizer. Throws if phi(xstar) != fmin.
  Objective with_minimizer(Vector xstar, double fmin) const;
  Objective with_critical_point(Vector point) const;

private:
  void check_dim(const Vector& x) const;

  std::string name_;
  int dim_;
  ValueFn value_;
  SubgradFn subgrad_;
  std::optional<double> fmin_;
  std::optional<Vector> xstar_;
  std::vector<Vector> other_critical_;
};

/// Parameters of one prox evaluation and of its multi-start inner solver.
struct ProxConfig {
  double p = 2.0;             // regularization order, > 1
  double gamma = 1.0;         // envelope parameter, > 0
  long inner_budget = 4000;   // function evaluations per inner solve
  double inner_tol = 1e-10;   // simplex diameter tolerance
  int n_starts = 8;           // starts per prox evaluation (x itself included)
  double cluster_radius = 1e-3;
  std::uint64_t seed = 0;

  double simplex_scale = 0.05;
  int inner_restarts = 0;           // extra NM solves from the returned point while they improve
  double value_tie_tol = 1e-8;      // reg values this close count as tied minimizers
  double unbounded_floor = -1e12;   // reg values below this report an envelope of -inf
  int escape_levels = 10;           // outward probe radii (1 + |x|) * 2^k, k = 1..escape_levels

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

enum class SolveStatus { converged, budget_exhausted };

const char* to_string(SolveStatus s);

/// One cluster of inner-solver results.
struct ProxCandidate {
  Vector y;
  double reg_value = kInf;  // phi(y) + |x-y|^p / (p gamma)
  double phi_value = kInf;  // phi(y)
  int hits = 0;             // number of starts that landed in this cluster
};

/// Result of a single HOPE/HOME evaluation at a base point x.
struct ProxSolution {
  Vector y;                   // best candidate
  double env_value = kInf;    // envelope value at x (-inf if unbounded below)
  double phi_y = kInf;        // phi(y)
  double residual = 0.0;      // |x - y|
  Vector grad;                // (1/gamma)|x-y|^{p-2}(x-y)
  std::vector<ProxCandidate> candidates;  // sorted by (reg_value, lexicographic y)
  int multiplicity = 1;       // candidates tied with the best within value_tie_tol
  SolveStatus status = SolveStatus::converged;
  bool unbounded = false;     // reg objective fell below unbounded_floor
  bool safeguard_used = false;  // no start improved on y = x
  bool starts_skipped = false;  // budget ran out before all starts were solved
  long evals = 0;

  bool single_valued() const { return !unbounded && multiplicity == 1; }
};

/// Per-iteration record of an optimization run.
struct Trace {
  std::vector<Vector> iterates;
  std::vector<double> f_values;
  std::vector<double> env_values;  // NaN where no envelope estimate exists
  std::vector<double> step_norms;  // one fewer entry than iterates
  std::vector<long> eval_counts;   // cumulative oracle calls
  std::vector<double> elapsed;     // seconds since start

  std::size_t size() const { return iterates.size(); }
  bool consistent() const;
  void push(const Vector& x, double f, double env, long evals, double seconds);
};

/// Shared evaluation / time budget for a full solver run.
struct RunLimits {
  long eval_budget = 0;          // 0 = unlimited
  double wallclock_seconds = 0;  // 0 = off
};

/// Tracks oracle calls and elapsed time against a RunLimits.
class BudgetTracker {
public:
  explicit BudgetTracker(RunLimits limits = {});

  long used() const { return used_; }
  /// Remaining evaluations, or a large number when unlimited.
  long remaining() const;
  void charge(long n) { used_ += n; }
  bool evals_exhausted() const { return limits_.eval_budget > 0 && used_ >= limits_.eval_budget; }
  bool time_exhausted() const;
  double seconds() const;
  const RunLimits& limits() const { return limits_; }

private:
  RunLimits limits_;
  long used_ = 0;
  std::chrono::steady_clock::time_point start_;
};

// Catalog of test objectives. Subgradient selections use sign(0) = 0.

/// (1/4)(x1-1)^2 + |x2 - 2 x1^2 + 1|, minimizer (1,1).
Objective make_ncr1();
/// (1/4)|x1-1| + |x2 - 2|x1| + 1|, minimizer (1,1), Clarke-critical trap (0,-1).
Objective make_ncr2();
/// x^4 - x^2 (1-D double well).
Objective make_quartic();
/// |x - 2|.
Objective make_abs_shift();
/// -|x| on [-1,1], |x| - 2 otherwise. Bounded below but 0 is not p-calm.
Objective make_notcalm();
/// -exp(x^2); every envelope is -inf.
Objective make_negexp();

/// Lookup by id: ncr1, ncr2, quartic, abs_shift, notcalm, negexp.
Objective objective_by_id(const std::string& id);
std::vector<std::string> objective_ids();

/// Lexicographic strict order on coordinates.
bool lex_less(const Vector& a, const Vector& b);

}  // namespace hippa

#endif  // HIPPA_CORE_HPP
