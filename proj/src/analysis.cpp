#include "hippa/analysis.hpp"

#include "hippa/envelope.hpp"
#include "hippa/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace hippa {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

std::vector<double> flatten(std::initializer_list<const Vector*> parts, std::vector<double> extra = {}) {
  std::vector<double> out;
  for (const Vector* v : parts) out.insert(out.end(), v->data(), v->data() + v->size());
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// |v|^{p-2} v with 0/0 = 0.
Vector duality_map(const Vector& v, double p) {
  const double n = v.norm();
  if (n == 0.0) return Vector::Zero(v.size());
  return std::pow(n, p - 2.0) * v;
}

// Checks big >= small up to slack * scale and records the outcome.
void check_ge(ProbeReport& rep, const char* part, double big, double small, double scale, double slack,
              const std::vector<double>& point) {
  const double denom = std::max(scale, std::numeric_limits<double>::min());
  rep.margin.add((big - small) / denom);
  if (!(big >= small - slack * scale)) rep.add_violation({part, point, big, small});
}

Vector random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(n);
  do {
    for (int j = 0; j < n; ++j) u[j] = normal(rng);
  } while (u.norm() == 0.0);
  return u / u.norm();
}

// Components N(0,1) scaled by 10^U(-2,2).
Vector random_scaled(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double mag = std::pow(10.0, expo(rng));
  Vector v(n);
  for (int j = 0; j < n; ++j) v[j] = mag * normal(rng);
  return v;
}

Vector random_in_ball(std::mt19937_64& rng, int n, double r) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Vector u = random_direction(rng, n);
  return r * std::pow(unif(rng), 1.0 / n) * u;
}

// Second point of a pair: mostly independent, sometimes a degenerate case.
Vector partner(std::mt19937_64& rng, const Vector& a, const std::function<Vector()>& fresh) {
  std::uniform_int_distribution<int> mode(0, 9);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (mode(rng)) {
    case 0: return a;
    case 1: return -a;
    case 2: return Vector::Zero(a.size());
    case 3: {
      Vector d(a.size());
      for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = normal(rng);
      return a + 1e-6 * std::max(a.norm(), 1e-3) * d;
    }
    default: return fresh();
  }
}

// Unit directions for sphere scans: +-1 in 1-D, equally spaced angles in
// 2-D, seeded random directions otherwise.
std::vector<Vector> sphere_directions(int dim, int count, std::uint64_t seed) {
  std::vector<Vector> dirs;
  if (dim == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
  } else if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      Vector u(2);
      u << std::cos(a), std::sin(a);
      dirs.push_back(u);
    }
  } else {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < count; ++k) dirs.push_back(random_direction(rng, dim));
  }
  return dirs;
}

// ((n-1-i) lo + i hi) / (n-1): symmetric grids hit 0 exactly.
double grid_coord(double lo, double hi, int i, int n) {
  if (n == 1) return 0.5 * (lo + hi);
  return ((n - 1 - i) * lo + i * hi) / (n - 1);
}

int grid_count_1d(double lo, double hi, double step) {
  return std::max(2, static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1);
}

std::vector<ProxSolution> solve_all(const Objective& phi, const std::vector<Vector>& xs, const ProxConfig& cfg) {
  std::vector<ProxSolution> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = eval_hope(phi, xs[i], cfg); }, worker_count());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(KappaBranch b) {
  switch (b) {
    case KappaBranch::linear: return "linear";
    case KappaBranch::exponential: return "exponential";
    case KappaBranch::unit: return "unit";
  }
  return "?";
}

double kappa_h1(double t) { return t * (t - 1.0) / 2.0; }

double kappa_h3(double t) { return 1.0 - std::pow(1.0 + (2.0 - kSqrt3) * t / (t - 1.0), 1.0 - t); }

double kappa_t_hat() {
  static const double root = [] {
    auto g = [](double t) { return kappa_h1(t) - kappa_h3(t); };
    double lo = 1.01, hi = 1.99;
    const bool lo_neg = g(lo) < 0.0;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if ((g(mid) < 0.0) == lo_neg) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

double kappa_linear(double t) { return (2.0 + kSqrt3) * (t - 1.0) / 16.0; }

double kappa_exponential(double t) {
  return (2.0 + kSqrt3) / 16.0 * (1.0 - std::pow(3.0 - kSqrt3, 1.0 - t));
}

double kappa_exact(double t) { return (2.0 + kSqrt3) * kappa_h3(t) / (8.0 * t); }

KappaEval kappa(double t) {
  if (!(t > 1.0 && t <= 2.0)) throw std::invalid_argument("kappa: t must lie in (1, 2]");
  KappaEval e;
  e.t = t;
  e.t_hat = kappa_t_hat();
  if (t == 2.0) {
    e.kappa = 1.0;
    e.branch = KappaBranch::unit;
  } else if (t <= e.t_hat) {
    e.kappa = kappa_linear(t);
    e.branch = KappaBranch::linear;
  } else {
    e.kappa = kappa_exponential(t);
    e.branch = KappaBranch::exponential;
  }
  return e;
}

void MarginStats::add(double m) {
  ++count;
  min = std::min(min, m);
  max = std::max(max, m);
  mean += (m - mean) / static_cast<double>(count);
}

void ProbeReport::add_violation(Witness w) {
  ++violation_count;
  if (violations.size() < std::max<std::size_t>(max_witnesses, 1)) violations.push_back(std::move(w));
}

// ---------------------------------------------------------------------------

ProbeReport verify_basic_ineq(double p, long samples, std::uint64_t seed, double slack) {
  if (!(p >= 1.0)) throw std::invalid_argument("verify_basic_ineq: p must be >= 1");
  ProbeReport rep;
  rep.claim = "basic_ineq";
  rep.details["p"] = p;
  rep.details["seed"] = static_cast<double>(seed);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (long s = 0; s < samples; ++s) {
    const int n = dim(rng);
    const Vector a = random_scaled(rng, n);
    const Vector b = partner(rng, a, [&] { return random_scaled(rng, n); });
    double lambda = 0.0;
    while (lambda <= 0.0 || lambda >= 1.0) lambda = unif(rng);
    const auto point = flatten({&a, &b}, {lambda});
    const double na = std::pow(a.norm(), p), nb = std::pow(b.norm(), p);

    const double sum = std::pow((a + b).norm(), p);
    const double t1 = std::pow(lambda, p - 1.0) * na;
    const double t2 = std::pow(lambda / (1.0 - lambda), p - 1.0) * nb;
    check_ge(rep, "a", sum, t1 - t2, sum + t1 + t2, slack, point);

    const double diff = std::pow((a - b).norm(), p);
    const double bound = std::pow(2.0, p - 1.0) * (na + nb);
    check_ge(rep, "b", bound, diff, bound + diff, slack, point);

    if (p >= 2.0) {
      const double inner = (duality_map(a, p) - duality_map(b, p)).dot(a - b);
      const double rhs = std::pow(0.5, p - 2.0) * diff;
      const double scale =
          (std::pow(a.norm(), p - 1.0) + std::pow(b.norm(), p - 1.0)) * (a - b).norm() + rhs;
      check_ge(rep, "c", inner, rhs, scale, slack, point);
    }
  }
  rep.samples = samples;
  return rep;
}

ProbeReport verify_lemma22(double p, double r, long samples, std::uint64_t seed, double slack) {
  if (!(p > 1.0)) throw std::invalid_argument("verify_lemma22: p must be > 1");
  if (!(r > 0.0)) throw std::invalid_argument("verify_lemma22: r must be > 0");
  ProbeReport rep;
  rep.claim = "lemma22";
  rep.details["p"] = p;
  rep.details["r"] = r;
  rep.details["seed"] = static_cast<double>(seed);
  const bool part_a = p <= 2.0;
  const bool part_b = p >= 2.0;
  const double kp = part_a ? kappa(p).kappa : 0.0;
  const double ks = part_b ? kappa(p / (p - 1.0)).kappa : 0.0;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 8);
  for (long s = 0; s < samples; ++s) {
    const int n = dim(rng);
    const Vector a = random_in_ball(rng, n, r);
    Vector b = partner(rng, a, [&] { return random_in_ball(rng, n, r); });
    if (b.norm() >= r) b = a - (b - a);
    if (b.norm() >= r) b = a;
    const auto point = flatten({&a, &b});
    const Vector ja = duality_map(a, p), jb = duality_map(b, p);
    const double d = (a - b).norm();

    if (part_a) {
      const double inner = (ja - jb).dot(a - b);
      const double rhs = kp * std::pow(r, p - 2.0) * d * d;
      const double scale = (ja.norm() + jb.norm()) * d + rhs;
      check_ge(rep, "a", inner, rhs, scale, slack, point);
    }
    if (part_b) {
      const double lhs = (ja - jb).norm();
      const double bound = 2.0 * std::pow(r, p - 2.0) / ks * d;
      check_ge(rep, "b", bound, lhs, bound + lhs, slack, point);
    }
  }
  rep.samples = samples;
  return rep;
}

// ---------------------------------------------------------------------------

ProbeReport check_p_calm(const Objective& phi, const Vector& xbar, double M, double p,
                         const CalmSampler& sampler) {
  if (!(M > 0.0) || !(p > 0.0)) throw std::invalid_argument("check_p_calm: M and p must be positive");
  const double f0 = phi.value(xbar);
  if (!std::isfinite(f0)) throw std::invalid_argument("check_p_calm: phi(xbar) must be finite");
  ProbeReport rep;
  rep.claim = "p_calm";
  rep.details["M"] = M;
  rep.details["p"] = p;
  rep.details["phi_xbar"] = f0;
  const double scale = 1.0 + std::abs(f0);
  const double threshold = f0 - sampler.slack * scale;

  auto probe = [&](const Vector& x) {
    const double d = (x - xbar).norm();
    if (d == 0.0) return;
    ++rep.samples;
    const double lhs = phi.value(x) + M * std::pow(d, p);
    rep.margin.add((lhs - f0) / scale);
    if (lhs <= threshold) rep.add_violation({"local_or_global", to_std(x), lhs, f0});
  };

  const int dim = static_cast<int>(xbar.size());
  const auto dirs = sphere_directions(dim, sampler.directions, sampler.seed);
  const double lmin = std::log(sampler.r_min), lmax = std::log(sampler.r_max);
  for (int i = 0; i < sampler.radii; ++i) {
    const double t = sampler.radii == 1 ? 0.0 : static_cast<double>(i) / (sampler.radii - 1);
    const double r = std::exp(lmin + t * (lmax - lmin));
    for (const Vector& u : dirs) probe(xbar + r * u);
  }
  std::mt19937_64 rng(sampler.seed + 1);
  std::uniform_real_distribution<double> box(-sampler.global_half_width, sampler.global_half_width);
  for (long s = 0; s < sampler.global_samples; ++s) {
    Vector x = xbar;
    for (int j = 0; j < dim; ++j) x[j] += box(rng);
    probe(x);
  }
  return rep;
}

ProxBoundReport check_prox_bounded(const Objective& phi, double p, const RadiusSchedule& schedule) {
  if (!(p > 0.0) || !(schedule.r0 > 0.0) || !(schedule.factor > 1.0) || schedule.count < 1)
    throw std::invalid_argument("check_prox_bounded: invalid p or radius schedule");
  ProxBoundReport out;
  out.report.claim = "prox_bounded";
  out.report.details["p"] = p;
  const auto dirs = sphere_directions(phi.dim(), schedule.directions, schedule.seed);

  Vector worst_last;
  double r = schedule.r0;
  for (int i = 0; i < schedule.count; ++i, r *= schedule.factor) {
    double best = kInf;
    Vector arg = dirs.front() * r;
    for (const Vector& u : dirs) {
      const Vector x = r * u;
      const double ratio = phi.value(x) / std::pow(r, p);
      ++out.report.samples;
      if (ratio < best) {
        best = ratio;
        arg = x;
      }
    }
    out.radii.push_back(r);
    out.min_ratio.push_back(best);
    worst_last = arg;
  }

  const auto& m = out.min_ratio;
  bool suspect = std::any_of(m.begin(), m.end(), [](double v) { return v == -kInf; });
  const int n = static_cast<int>(m.size());
  if (!suspect && schedule.tail >= 1 && n >= schedule.tail + 1) {
    bool falling = m.back() < 0.0;
    for (int j = n - schedule.tail; j < n && falling; ++j) {
      const double d = m[j] - m[j - 1];
      if (!(d < 0.0)) falling = false;
      if (j > n - schedule.tail && d > schedule.decay_ratio * (m[j - 1] - m[j - 2])) falling = false;
    }
    suspect = falling;
  }
  out.suspected_unbounded = suspect;
  out.report.details["suspected_unbounded"] = suspect ? 1.0 : 0.0;
  out.report.details["last_min_ratio"] = m.back();
  if (suspect) out.report.add_violation({"ratio_unbounded", to_std(worst_last), m.back(), m.front()});
  return out;
}

// ---------------------------------------------------------------------------

ProbeReport sublevel_containment(const Objective& phi, double lambda, const Vector& center, double r,
                                 const ProxConfig& cfg, const GridSpec& grid, double outer_factor) {
  const int dim = phi.dim();
  if (dim != 1 && dim != 2) throw std::invalid_argument("sublevel_containment: 1-D or 2-D objectives only");
  if (center.size() != dim) throw std::invalid_argument("sublevel_containment: center dimension mismatch");
  if (!(r > 0.0) || !(outer_factor > 1.0))
    throw std::invalid_argument("sublevel_containment: need r > 0 and outer_factor > 1");
  const double outer = outer_factor * r;

  std::vector<Vector> xs;
  if (dim == 1) {
    const int half = static_cast<int>(std::floor(outer / grid.step_1d));
    for (int k = -half; k <= half; ++k) {
      const double off = k * grid.step_1d;
      if (std::abs(off) > r && std::abs(off) <= outer) xs.push_back(center + Vector::Constant(1, off));
    }
  } else {
    const int n = grid.n_2d;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vector off(2);
        off << grid_coord(-outer, outer, i, n), grid_coord(-outer, outer, j, n);
        const double d = off.norm();
        if (d > r && d <= outer) xs.push_back(center + off);
      }
  }

  ProbeReport rep;
  rep.claim = "sublevel";
  rep.details["lambda"] = lambda;
  rep.details["r"] = r;
  rep.details["outer"] = outer;
  rep.details["gamma"] = cfg.gamma;
  rep.details["p"] = cfg.p;
  const auto sols = solve_all(phi, xs, cfg);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double env = sols[i].env_value;
    rep.margin.add((env - lambda) / (1.0 + std::abs(lambda)));
    if (env <= lambda) rep.add_violation({"inside_sublevel", to_std(xs[i]), env, lambda});
  }
  rep.samples = static_cast<long>(xs.size());
  return rep;
}

SingleValuedReport single_valuedness_probe(const Objective& phi, const Box& box, const ProxConfig& cfg,
                                           const GridSpec& grid, double grad_jump_tol) {
  const int dim = phi.dim();
  if (dim != 1 && dim != 2) throw std::invalid_argument("single_valuedness_probe: 1-D or 2-D objectives only");
  if (box.lo.size() != dim || box.hi.size() != dim || !(box.lo.array() <= box.hi.array()).all())
    throw std::invalid_argument("single_valuedness_probe: invalid box");

  std::vector<int> counts(dim);
  for (int d = 0; d < dim; ++d)
    counts[d] = dim == 1 ? grid_count_1d(box.lo[d], box.hi[d], grid.step_1d) : grid.n_2d;
  const int nx = counts[0];
  const int ny = dim == 2 ? counts[1] : 1;

  std::vector<Vector> xs;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      Vector x(dim);
      x[0] = grid_coord(box.lo[0], box.hi[0], i, nx);
      if (dim == 2) x[1] = grid_coord(box.lo[1], box.hi[1], j, ny);
      xs.push_back(x);
    }
  const auto sols = solve_all(phi, xs, cfg);

  SingleValuedReport out;
  out.report.claim = "single_valued";
  out.report.samples = static_cast<long>(xs.size());
  out.report.details["p"] = cfg.p;
  out.report.details["gamma"] = cfg.gamma;
  std::vector<char> good(xs.size());
  long multi = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    ProbePoint pt;
    pt.x = xs[k];
    pt.multiplicity = sols[k].unbounded ? 0 : sols[k].multiplicity;
    for (int c = 0; c < pt.multiplicity && c < static_cast<int>(sols[k].candidates.size()); ++c)
      pt.minimizers.push_back(sols[k].candidates[c].y);
    pt.grad = sols[k].grad;
    pt.env = sols[k].env_value;
    good[k] = pt.multiplicity == 1;
    if (!good[k]) {
      ++multi;
      out.report.add_violation({"multivalued", to_std(pt.x), static_cast<double>(pt.multiplicity), 1.0});
    }
    out.points.push_back(std::move(pt));
  }
  out.report.details["multivalued_points"] = static_cast<double>(multi);

  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * ny + j; };
  // Jumps along +x (index 0) and +y (index 1) edges; NaN where an end is multi-valued.
  const double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::array<double, 2>> jumps(xs.size(), {kNaN, kNaN});
  auto link = [&](std::size_t a, std::size_t b, int axis) {
    if (!good[a] || !good[b]) return;
    const double jmp = (out.points[a].grad - out.points[b].grad).lpNorm<Eigen::Infinity>();
    jumps[a][axis] = jmp;
    if (jmp > grad_jump_tol)
      out.report.add_violation({"grad_jump", flatten({&out.points[a].x, &out.points[b].x}), jmp, grad_jump_tol});
  };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      if (i + 1 < nx) link(idx(i, j), idx(i + 1, j), 0);
      if (j + 1 < ny) link(idx(i, j), idx(i, j + 1), 1);
    }
  auto edge_ok = [&](std::size_t a, int axis) { return jumps[a][axis] <= grad_jump_tol; };

  if (dim == 1) {
    int best_start = -1, best_len = 0;
    for (int i = 0; i < nx;) {
      if (!good[idx(i, 0)]) {
        ++i;
        continue;
      }
      int e = i;
      while (e + 1 < nx && edge_ok(idx(e, 0), 0)) ++e;
      if (e - i + 1 > best_len) {
        best_len = e - i + 1;
        best_start = i;
      }
      i = e + 1;
    }
    if (best_start >= 0) {
      const int e = best_start + best_len - 1;
      out.region = Box{xs[idx(best_start, 0)], xs[idx(e, 0)]};
      for (int i = best_start; i < e; ++i) out.max_grad_jump = std::max(out.max_grad_jump, jumps[idx(i, 0)][0]);
    }
  } else {
    // Grow a square around the centre cell while all its cells and internal edges are fine.
    const int ci = (nx - 1) / 2, cj = (ny - 1) / 2;
    const int kmax = std::min({ci, nx - 1 - ci, cj, ny - 1 - cj});
    auto square_ok = [&](int k, double& worst) {
      for (int i = ci - k; i <= ci + k; ++i)
        for (int j = cj - k; j <= cj + k; ++j) {
          if (!good[idx(i, j)]) return false;
          if (i < ci + k) {
            if (!edge_ok(idx(i, j), 0)) return false;
            worst = std::max(worst, jumps[idx(i, j)][0]);
          }
          if (j < cj + k) {
            if (!edge_ok(idx(i, j), 1)) return false;
            worst = std::max(worst, jumps[idx(i, j)][1]);
          }
        }
      return true;
    };
    int best_k = -1;
    double worst = 0.0;
    for (int k = 0; k <= kmax; ++k) {
      double w = 0.0;
      if (!square_ok(k, w)) break;
      best_k = k;
      worst = w;
    }
    if (best_k >= 0) {
      out.region = Box{xs[idx(ci - best_k, cj - best_k)], xs[idx(ci + best_k, cj + best_k)]};
      out.max_grad_jump = worst;
    }
  }
  if (out.region) {
    for (int d = 0; d < dim; ++d) {
      out.report.details["region_lo_" + std::to_string(d)] = out.region->lo[d];
      out.report.details["region_hi_" + std::to_string(d)] = out.region->hi[d];
    }
  }
  out.report.details["max_grad_jump"] = out.max_grad_jump;
  return out;
}

// ---------------------------------------------------------------------------

HolderFit holder_fit(const Objective& phi, const Vector& xbar, const ProxConfig& cfg, int samples,
                     const HolderFitOptions& opts) {
  if (xbar.size() != phi.dim()) throw std::invalid_argument("holder_fit: dimension mismatch");
  if (samples < 1 || !(opts.radius > 0.0) || !(opts.min_dist > 0.0) || opts.min_dist > opts.radius)
    throw std::invalid_argument("holder_fit: invalid sampling options");
  const int dim = phi.dim();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> logd(std::log(opts.min_dist), std::log(opts.radius));
  std::vector<Vector> xs;
  for (int s = 0; s < samples; ++s) {
    const Vector x1 = xbar + random_in_ball(rng, dim, opts.radius);
    const Vector x2 = x1 + std::exp(logd(rng)) * random_direction(rng, dim);
    xs.push_back(x1);
    xs.push_back(x2);
  }
  const auto sols = solve_all(phi, xs, cfg);

  std::vector<double> lx, ly;
  for (int s = 0; s < samples; ++s) {
    const auto& a = sols[2 * s];
    const auto& b = sols[2 * s + 1];
    if (!a.single_valued() || !b.single_valued()) continue;
    const double dg = (b.grad - a.grad).norm();
    const double dx = (xs[2 * s + 1] - xs[2 * s]).norm();
    if (!(dg > 0.0) || !std::isfinite(dg)) continue;
    lx.push_back(std::log(dx));
    ly.push_back(std::log(dg));
  }
  if (static_cast<int>(lx.size()) < opts.min_pairs)
    throw InsufficientRegionError("holder_fit: only " + std::to_string(lx.size()) +
                                  " usable pairs, need " + std::to_string(opts.min_pairs));

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientRegionError("holder_fit: pair distances are degenerate");
  HolderFit fit;
  fit.nu_hat = sxy / sxx;
  fit.L_hat = std::exp(my - fit.nu_hat * mx);
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.pairs = static_cast<int>(lx.size());
  return fit;
}

double guaranteed_holder_exponent(double p, double q) {
  if (p > 1.0 && p <= 2.0 && q >= 2.0) return (p - 1.0) / q;
  if (p >= 2.0 && q >= p) return 1.0 / q;
  throw std::invalid_argument("guaranteed_holder_exponent: need p in (1,2] with q >= 2, or q >= p >= 2");
}

ProbeReport gradient_fd_check(const Objective& phi, const std::vector<Vector>& points, const ProxConfig& cfg,
                              double h, double tol) {
  if (!(h > 0.0)) throw std::invalid_argument("gradient_fd_check: h must be positive");
  if (tol <= 0.0) tol = std::max(1e-4, 10.0 * cfg.inner_tol);
  ProbeReport rep;
  rep.claim = "gradient";
  rep.details["h"] = h;
  rep.details["tol"] = tol;

  std::vector<Vector> xs;
  for (const Vector& x : points) {
    if (x.size() != phi.dim()) throw std::invalid_argument("gradient_fd_check: dimension mismatch");
    xs.push_back(x);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      Vector e = Vector::Zero(x.size());
      e[j] = h;
      xs.push_back(x + e);
      xs.push_back(x - e);
    }
  }
  const auto sols = solve_all(phi, xs, cfg);

  const std::size_t stride = 1 + 2 * static_cast<std::size_t>(phi.dim());
  long skipped = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& base = sols[k * stride];
    if (!base.single_valued()) {
      ++skipped;
      continue;
    }
    Vector fd(phi.dim());
    for (int j = 0; j < phi.dim(); ++j)
      fd[j] = (sols[k * stride + 1 + 2 * j].env_value - sols[k * stride + 2 + 2 * j].env_value) / (2.0 * h);
    const double err = (base.grad - fd).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, err);
    ++rep.samples;
    rep.margin.add((tol - err) / tol);
    if (!(err <= tol)) rep.add_violation({"fd_mismatch", to_std(points[k]), err, tol});
  }
  rep.details["skipped"] = static_cast<double>(skipped);
  rep.details["max_error"] = worst;
  return rep;
}

double calm_neighborhood_radius(double p, double gamma, double M, double eps) {
  if (!(p > 1.0) || !(gamma > 0.0) || !(M > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("calm_neighborhood_radius: need p > 1 and gamma, M, eps > 0");
  const double gap = std::pow(2.0, 1.0 - p) - M * p * gamma;
  if (!(gap > 0.0)) throw std::invalid_argument("calm_neighborhood_radius: need gamma < 2^{1-p}/(M p)");
  const double mu = 1.0 / gap;
  const double c = std::pow(2.0 * mu, 1.0 / p);
  const double r1 = eps / c;
  const double r2 = std::pow(p * gamma * eps, 1.0 / p);
  const double r3 = std::pow(gamma * eps, 1.0 / (p - 1.0)) / (1.0 + c);
  return 0.5 * std::min({r1, r2, r3});
}

ProbeReport uniform_boundedness_probe(const Objective& phi, const Vector& xbar, double M,
                                      const ProxConfig& cfg, double eps, int samples, std::uint64_t seed) {
  const double rho = calm_neighborhood_radius(cfg.p, cfg.gamma, M, eps);
  const double f0 = phi.value(xbar);
  if (!std::isfinite(f0)) throw std::invalid_argument("uniform_boundedness_probe: phi(xbar) must be finite");
  ProbeReport rep;
  rep.claim = "uniform_bounded";
  rep.details["rho"] = rho;
  rep.details["eps"] = eps;
  rep.details["M"] = M;

  std::mt19937_64 rng(seed);
  std::vector<Vector> xs;
  for (int s = 0; s < samples; ++s) xs.push_back(xbar + random_in_ball(rng, phi.dim(), rho));
  const auto sols = solve_all(phi, xs, cfg);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto& s = sols[k];
    const double dist = (s.y - xbar).norm();
    const double excess = s.phi_y - f0;
    const double grad = std::pow((xs[k] - s.y).norm(), cfg.p - 1.0) / cfg.gamma;
    const auto pt = to_std(xs[k]);
    for (auto [part, v] : {std::pair{"dist", dist}, std::pair{"value", excess}, std::pair{"residual", grad}}) {
      rep.margin.add((eps - v) / eps);
      if (!(v < eps)) rep.add_violation({part, pt, v, eps});
    }
  }
  rep.samples = samples;
  return rep;
}

}  // namespace hippa
