// Acceptance suite: one PASS/FAIL line per criterion.
#include "hippa/analysis.hpp"
#include "hippa/bench.hpp"
#include "hippa/envelope.hpp"
#include "hippa/hippa.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace hippa;
using oracle::v1;
using oracle::v2;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ProxConfig cfg_of(double p, double gamma) {
  ProxConfig c;
  c.p = p;
  c.gamma = gamma;
  return c;
}

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s >= limit_s) o.require(false, "runtime " + num(s) + " s over " + num(limit_s) + " s");
  if (!o.ok) ++failures;
  std::printf("criterion %2d: %s  %s (%.2f s) %s\n", id, o.ok ? "PASS" : "FAIL", title, s, o.detail.c_str());
  std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  criterion(1, "kappa constants", 1.0, [] {
    Outcome o;
    const double t = kappa_t_hat();
    const double gap = std::fabs(kappa_linear(t) - kappa_exact(t));
    o.require(kappa(2.0).kappa == 1.0, "kappa(2) != 1");
    o.require(t >= 1.3209 && t <= 1.3219, "t_hat out of range");
    o.require(gap <= 1e-9, "branch gap " + num(gap));
    o.note("t_hat=" + std::to_string(t) + " gap=" + num(gap));
    return o;
  });

  criterion(2, "inequality suites", 10.0, [] {
    Outcome o;
    long violations = 0, runs = 0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 10.0}) {
      const ProbeReport r = verify_basic_ineq(p, 10000, 2024);
      violations += r.violation_count;
      o.require(r.samples == 10000, "sample count");
      ++runs;
    }
    for (double p : {1.2, 1.5, 2.0, 3.0, 4.0})
      for (double r : {0.5, 1.0, 10.0}) {
        const ProbeReport rep = verify_lemma22(p, r, 10000, 2024);
        violations += rep.violation_count;
        o.require(rep.samples == 10000, "sample count");
        ++runs;
      }
    o.require(violations == 0, std::to_string(violations) + " violations");
    o.note(std::to_string(runs) + " suites x 1e4 samples");
    return o;
  });

  criterion(3, "Huber envelope oracle", 30.0, [] {
    Outcome o;
    const Objective phi = make_abs_shift();
    double worst = 0;
    for (double gamma : {0.4, 1.0}) {
      for (int i = 0; i <= 400; ++i) {
        const double x = 4.0 * i / 400.0;
        const double env = eval_home(phi, v1(x), cfg_of(2, gamma));
        const double closed = oracle::huber(x, 2, gamma);
        const auto grid = oracle::grid_min_1d(
            [&](double y) { return std::fabs(y - 2) + (x - y) * (x - y) / (2 * gamma); }, -1, 5, 1e-3);
        worst = std::max({worst, std::fabs(env - closed), std::fabs(env - grid.value)});
      }
    }
    o.require(worst <= 1e-6, "max error " + num(worst));
    o.note("max error " + num(worst));
    return o;
  });

  criterion(4, "sublevel containment example", 30.0, [] {
    Outcome o;
    const bool wide = sublevel_containment(make_abs_shift(), 1.0, v1(2), 1.35, cfg_of(2, 1.0)).pass();
    const bool narrow = sublevel_containment(make_abs_shift(), 1.0, v1(2), 1.35, cfg_of(2, 0.4)).pass();
    o.require(!wide, "gamma=1 should fail containment");
    o.require(narrow, "gamma=0.4 should contain");
    return o;
  });

  criterion(5, "non-single-valued prox detection", 10.0, [] {
    Outcome o;
    const double root = oracle::quartic_p3_prox_root();
    const auto grid = oracle::grid_global_minimizers_1d(
        [](double y) { return y * y * y * y - y * y + std::fabs(y * y * y) / 3; }, -2, 2, 1e-5, 1e-10);
    o.require(grid.size() == 2 && std::fabs(grid[0] + root) < 1e-4 && std::fabs(grid[1] - root) < 1e-4,
              "grid oracle disagrees with root");
    GridSpec g;
    g.step_1d = 0.01;
    const SingleValuedReport r = single_valuedness_probe(make_quartic(), {v1(-0.1), v1(0.1)}, cfg_of(3, 1), g);
    bool seen = false;
    for (const auto& pt : r.points) {
      if (pt.x[0] != 0.0) continue;
      seen = true;
      o.require(pt.multiplicity == 2, "multiplicity " + std::to_string(pt.multiplicity));
      if (pt.minimizers.size() == 2) {
        const double a = std::min(pt.minimizers[0][0], pt.minimizers[1][0]);
        const double b = std::max(pt.minimizers[0][0], pt.minimizers[1][0]);
        o.require(std::fabs(a + root) < 1e-4 && std::fabs(b - root) < 1e-4, "cluster locations");
        o.note("clusters " + num(a) + ", " + num(b));
      }
    }
    o.require(seen, "x=0 not on the grid");
    return o;
  });

  criterion(6, "unbounded envelope detection", 10.0, [] {
    Outcome o;
    for (double gamma : {0.1, 1.0, 10.0})
      o.require(eval_home(make_negexp(), v1(0.0), cfg_of(2, gamma)) == -kInf, "gamma=" + num(gamma));
    o.require(check_prox_bounded(make_negexp(), 2).suspected_unbounded, "not flagged");
    return o;
  });

  criterion(7, "HiPPA monotonicity and bounds", 60.0, [] {
    Outcome o;
    struct Case {
      const char* id;
      double p, gamma;
    };
    for (const Case& c : {Case{"ncr1", 2.5, 50}, Case{"ncr2", 1.25, 9.1}}) {
      const Objective phi = objective_by_id(c.id);
      const ProxConfig cfg = cfg_of(c.p, c.gamma);
      const HippaResult r = run_hippa(phi, v2(-1, 1), cfg, 1e-6, 1000000);
      const ChainCheck chain = check_monotonicity(r.trace, 1e-9);
      o.require(chain.ok(), std::string(c.id) + " chain worst " + num(chain.worst));
      o.require(r.iter_bound && r.iterations <= *r.iter_bound, std::string(c.id) + " iteration bound");
      o.require(r.stop_reason == StopReason::step_tol, std::string(c.id) + " did not reach eps");
      o.require(r.criticality <= criticality_bound(1e-6, cfg), std::string(c.id) + " certificate");
      o.note(std::string(c.id) + ": " + std::to_string(r.iterations) + " iters, cert " + num(r.criticality) +
             " <= " + num(criticality_bound(1e-6, cfg)));
    }
    return o;
  });

  criterion(8, "Table 1 qualitative reproduction", 300.0, [] {
    Outcome o;
    Report r = run_experiment(preset("table1"));
    apply_preset_checks(r);
    for (const auto& [k, v] : r.flags) o.require(v, k);
    for (const auto& rec : r.runs) o.require(rec.evals <= 50000, rec.run_id() + " over budget");
    double worst_h = 0, worst_nm = 0, best_sg = kInf;
    for (const auto& rec : r.runs) {
      if (rec.solver == "hippa") worst_h = std::max(worst_h, *rec.rel_error);
      if (rec.solver == "nm") worst_nm = std::max(worst_nm, *rec.rel_error);
      if (rec.solver == "sg-dss") best_sg = std::min(best_sg, *rec.rel_error);
    }
    o.note("max hippa " + num(worst_h) + ", max nm " + num(worst_nm) + ", min sg-dss " + num(best_sg));
    return o;
  });

  criterion(9, "trap experiment", 60.0, [] {
    Outcome o;
    Report r = run_experiment(preset("trap"));
    apply_preset_checks(r);
    for (const auto& [k, v] : r.flags) o.require(v, k);
    for (const auto& rec : r.runs)
      o.note(rec.solver + " ends at (" + num(rec.x_final[0]) + ", " + num(rec.x_final[1]) + ")");
    return o;
  });

  criterion(10, "gradient and Hoelder checks", 120.0, [] {
    Outcome o;
    const ProxConfig cfg = cfg_of(2, 0.2);
    GridSpec g;
    g.step_1d = 0.01;
    const SingleValuedReport sv = single_valuedness_probe(make_quartic(), {v1(-1.5), v1(1.5)}, cfg, g);
    o.require(sv.region.has_value(), "no single-valued region");
    if (sv.region) {
      std::mt19937_64 rng(77);
      std::uniform_real_distribution<double> u(sv.region->lo[0], sv.region->hi[0]);
      std::vector<Vector> pts;
      for (int i = 0; i < 100; ++i) pts.push_back(v1(u(rng)));
      const ProbeReport fd = gradient_fd_check(make_quartic(), pts, cfg);
      o.require(fd.pass() && fd.samples == 100, "finite-difference mismatch");
      o.note("fd max error " + num(fd.details.at("max_error")));
    }
    const double nu = guaranteed_holder_exponent(2, 2);
    const HolderFit huber = holder_fit(make_abs_shift(), v1(2), cfg_of(2, 1), 200);
    const HolderFit quartic = holder_fit(make_quartic(), v1(1 / std::sqrt(2.0)), cfg_of(2, 0.1), 200);
    o.require(huber.nu_hat >= nu - 0.1, "huber slope " + num(huber.nu_hat));
    o.require(quartic.nu_hat >= nu - 0.1, "quartic slope " + num(quartic.nu_hat));
    o.note("nu_hat huber " + num(huber.nu_hat) + ", quartic " + num(quartic.nu_hat) + ", guaranteed " + num(nu));
    return o;
  });

  criterion(11, "determinism of table1 reports", 600.0, [] {
    Outcome o;
    const fs::path base = fs::temp_directory_path() / ("hippa_accept_" + std::to_string(::getpid()));
    fs::remove_all(base);
    for (const char* sub : {"a", "b"}) {
      fs::create_directories(base / sub);
      Report r = run_experiment(preset("table1"));
      apply_preset_checks(r);
      write_report(r, base / sub / "table1.json");
    }
    o.require(slurp(base / "a" / "table1.json") == slurp(base / "b" / "table1.json"), "report bytes differ");
    int files = 0;
    for (const auto& e : fs::directory_iterator(base / "a" / "table1.traces")) {
      ++files;
      o.require(slurp(e.path()) == slurp(base / "b" / "table1.traces" / e.path().filename()),
                e.path().filename().string() + " differs");
    }
    o.note(std::to_string(files) + " trace files compared");
    fs::remove_all(base);
    return o;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
