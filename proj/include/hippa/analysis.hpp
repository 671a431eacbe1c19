#ifndef HIPPA_ANALYSIS_HPP
#define HIPPA_ANALYSIS_HPP

#include "hippa/core.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hippa {

// ---------------------------------------------------------------------------
// kappa

enum class KappaBranch { linear, exponential, unit };

const char* to_string(KappaBranch b);

struct KappaEval {
  double t = 0.0;
  double kappa = 0.0;
  KappaBranch branch = KappaBranch::unit;
  double t_hat = 0.0;
};

double kappa_h1(double t);  // t(t-1)/2
double kappa_h3(double t);  // 1 - [1 + (2-sqrt3) t/(t-1)]^{1-t}

/// Root of h1 = h3, by bisection on [1.01, 1.99] to width 1e-12. Cached.
double kappa_t_hat();

/// (2+sqrt3)(t-1)/16.
double kappa_linear(double t);
/// (2+sqrt3)/16 (1 - (3-sqrt3)^{1-t}).
double kappa_exponential(double t);
/// (2+sqrt3) h3(t) / (8t): the constant before the exponential branch
/// lower-bounds it. Equals kappa_linear exactly where h1 = h3.
double kappa_exact(double t);

/// Piecewise kappa on (1, 2]; kappa(2) = 1. Throws std::invalid_argument
/// outside (1, 2].
KappaEval kappa(double t);

// ---------------------------------------------------------------------------
// probe reports

struct Witness {
  std::string part;           // which condition failed
  std::vector<double> point;  // flattened sample that violates it
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Running min / max / mean of normalized margins (>= 0 means satisfied).
struct MarginStats {
  long count = 0;
  double min = kInf;
  double max = -kInf;
  double mean = 0.0;

  void add(double m);
};

struct ProbeReport {
  std::string claim;
  long samples = 0;
  long violation_count = 0;
  std::vector<Witness> violations;  // the first max_witnesses ones
  MarginStats margin;
  std::map<std::string, double> details;
  std::size_t max_witnesses = 16;

  bool pass() const { return violation_count == 0; }
  void add_violation(Witness w);
};

// ---------------------------------------------------------------------------
// inequality suites

/// Random (a, b, lambda) in dimensions 1-8 checked against
///   (a) |a+b|^p >= lambda^{p-1}|a|^p - (lambda/(1-lambda))^{p-1}|b|^p   (p >= 1)
///   (b) |a-b|^p <= 2^{p-1}(|a|^p + |b|^p)                              (p >= 1)
///   (c) <|a|^{p-2}a - |b|^{p-2}b, a-b> >= 2^{2-p}|a-b|^p               (p >= 2)
/// with relative slack `slack`. Throws std::invalid_argument if p < 1.
ProbeReport verify_basic_ineq(double p, long samples, std::uint64_t seed, double slack = 1e-12);

/// a, b uniform in the open ball B(0; r), dimensions 1-8, checked against
///   (a) <|a|^{p-2}a - |b|^{p-2}b, a-b> >= kappa_p r^{p-2}|a-b|^2      (1 < p <= 2)
///   (b) ||a|^{p-2}a - |b|^{p-2}b| <= (2 r^{p-2}/kappa_s)|a-b|, s = p/(p-1)   (p >= 2)
/// Throws std::invalid_argument if p <= 1 or r <= 0.
ProbeReport verify_lemma22(double p, double r, long samples, std::uint64_t seed,
                           double slack = 1e-12);

// ---------------------------------------------------------------------------
// calmness and boundedness

struct CalmSampler {
  double r_min = 1e-6;  // local shells are log-spaced in [r_min, r_max]
  double r_max = 1.0;
  int radii = 60;
  int directions = 64;  // per shell; 1-D always uses +-1
  long global_samples = 10000;
  double global_half_width = 4.0;  // uniform samples in xbar +- this
  std::uint64_t seed = 0;
  double slack = 1e-12;  // relative to 1 + |phi(xbar)|
};

/// Looks for x != xbar with phi(x) + M|x - xbar|^p <= phi(xbar). Any such x
/// is a witness that xbar is not p-calm with constant M.
ProbeReport check_p_calm(const Objective& phi, const Vector& xbar, double M, double p,
                         const CalmSampler& sampler = {});

struct RadiusSchedule {
  double r0 = 1.0;
  double factor = 2.0;  // radii r0 * factor^i
  int count = 12;
  int directions = 64;
  std::uint64_t seed = 0;
  int tail = 3;             // trailing decreases inspected
  double decay_ratio = 0.9;  // each decrease at least this fraction of the previous one
};

struct ProxBoundReport {
  ProbeReport report;
  std::vector<double> radii;
  std::vector<double> min_ratio;  // min over the sphere of phi(x)/|x|^p
  bool suspected_unbounded = false;
};

/// Estimates liminf phi(x)/|x|^p over growing spheres. Flags suspected
/// unboundedness when a ratio is -inf or when the last `tail` decreases are
/// negative, non-decaying and end below zero.
ProxBoundReport check_prox_bounded(const Objective& phi, double p, const RadiusSchedule& schedule = {});

struct GridSpec {
  double step_1d = 1e-3;
  int n_2d = 201;  // points per axis
};

/// Checks that the envelope sublevel set {env <= lambda} lies in B(center; r)
/// by evaluating the envelope on the grid points with r < |x - center| <=
/// outer_factor * r. 1-D and 2-D only.
ProbeReport sublevel_containment(const Objective& phi, double lambda, const Vector& center, double r,
                                 const ProxConfig& cfg, const GridSpec& grid = {},
                                 double outer_factor = 2.0);

struct Box {
  Vector lo;
  Vector hi;
};

struct ProbePoint {
  Vector x;
  int multiplicity = 1;
  std::vector<Vector> minimizers;  // tied candidates
  Vector grad;
  double env = 0.0;
};

struct SingleValuedReport {
  ProbeReport report;
  std::vector<ProbePoint> points;  // row-major grid order
  std::optional<Box> region;       // longest run (1-D) or largest centered sub-box (2-D)
  double max_grad_jump = 0.0;      // between neighbours inside `region`
};

/// Runs eval_hope on a grid over `box` (1-D or 2-D), records multiplicities,
/// and reports the largest single-valued region on which neighbouring
/// gradients differ by at most grad_jump_tol.
SingleValuedReport single_valuedness_probe(const Objective& phi, const Box& box, const ProxConfig& cfg,
                                           const GridSpec& grid = {}, double grad_jump_tol = 0.1);

// ---------------------------------------------------------------------------
// smoothness

class InsufficientRegionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct HolderFitOptions {
  double radius = 0.1;    // sample x1 in B(xbar; radius)
  double min_dist = 1e-3;  // |x2 - x1| log-uniform in [min_dist, radius]
  int min_pairs = 10;
  std::uint64_t seed = 0;
};

struct HolderFit {
  double nu_hat = 0.0;
  double L_hat = 0.0;
  double r_squared = 0.0;
  int pairs = 0;
};

/// Least-squares fit of log|grad(x2) - grad(x1)| against log|x2 - x1|.
/// Pairs with a multi-valued prox or equal gradients are dropped; throws
/// InsufficientRegionError when fewer than min_pairs remain.
HolderFit holder_fit(const Objective& phi, const Vector& xbar, const ProxConfig& cfg, int samples,
                     const HolderFitOptions& opts = {});

/// Hoelder exponent of the envelope gradient near a p-calm, q-prox-regular
/// point: (p-1)/q for p in (1,2] and q >= 2, 1/q for p >= 2 and q >= p.
/// Throws std::invalid_argument outside those ranges.
double guaranteed_holder_exponent(double p, double q);

/// Compares home_gradient with central differences of the envelope at each
/// point (infinity norm). Points with a multi-valued prox are skipped and
/// counted in details["skipped"]. tol <= 0 selects max(1e-4, 10 inner_tol).
ProbeReport gradient_fd_check(const Objective& phi, const std::vector<Vector>& points,
                              const ProxConfig& cfg, double h = 1e-5, double tol = 0.0);

/// Largest radius rho of the neighbourhood U = B(xbar; rho) on which prox
/// solutions satisfy |y - xbar| < eps, phi(y) - phi(xbar) < eps and
/// |x - y|^{p-1}/gamma < eps, halved for safety. Requires
/// gamma < 2^{1-p}/(M p); throws std::invalid_argument otherwise.
double calm_neighborhood_radius(double p, double gamma, double M, double eps);

/// Samples x in B(xbar; calm_neighborhood_radius) and checks the three
/// bounds above on the computed prox points.
ProbeReport uniform_boundedness_probe(const Objective& phi, const Vector& xbar, double M,
                                      const ProxConfig& cfg, double eps, int samples,
                                      std::uint64_t seed = 0);

}  // namespace hippa

#endif  // HIPPA_ANALYSIS_HPP
