#include "hippa/analysis.hpp"
#include "hippa/bench.hpp"
#include "hippa/core.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
using namespace hippa;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct RunOverrides {
  std::string config;
  std::optional<std::string> solver, objective;
  std::optional<double> p, gamma, eps;
  std::optional<long> budget;
  std::optional<std::uint64_t> seed;
  std::string out;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
}

ExperimentConfig build_config(const RunOverrides& o) {
  json j = o.config.empty() ? json::object() : read_json_file(o.config);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (o.solver) {
    j["solver"] = *o.solver;
    j.erase("solvers");
    j.erase("label");
  }
  if (o.objective) j["objective"] = *o.objective;
  if (o.budget) {
    j["budget"] = *o.budget;
    j["budget_mode"] = "evals";
  }
  if (o.seed) j["seed"] = *o.seed;
  auto patch = [&](const char* key, const std::optional<double>& v) {
    if (!v) return;
    j[key] = *v;
    if (j.contains("solvers"))
      for (auto& s : j["solvers"])
        if (s.is_object()) s[key] = *v;
  };
  patch("p", o.p);
  patch("gamma", o.gamma);
  patch("eps", o.eps);
  if (!j.contains("inits") && !j.contains("random_inits")) j["random_inits"] = 1;
  return config_from_json(j);
}

void print_summary(const Report& rep) {
  for (const auto& r : rep.runs) {
    std::printf("%-24s init %-2d f=%-22.15g relerr=%-12s iters=%-8ld evals=%-8ld %s %s\n", r.label.c_str(),
                r.init_index, r.f_final,
                r.rel_error ? (std::ostringstream() << *r.rel_error).str().c_str() : "n/a", r.iterations,
                r.evals, r.status.c_str(), r.pass() ? "ok" : "FAIL");
  }
  for (const auto& [k, v] : rep.flags) std::printf("%-36s %s\n", k.c_str(), v ? "PASS" : "FAIL");
}

int finish_experiment(Report rep, const std::string& out) {
  if (!out.empty()) write_report(rep, out);
  print_summary(rep);
  return rep.pass() ? kExitPass : kExitFail;
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw std::invalid_argument("bad point '" + s + "'");
    v.push_back(d);
  }
  if (v.empty()) throw std::invalid_argument("empty point");
  return v;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct VerifyArgs {
  std::string claim;
  std::string objective = "ncr1";
  double p = 2.0, gamma = 1.0, r = 1.0, M = 1.0, q = 2.0, eps = 1e-2, lambda = 0.0;
  long samples = 10000;
  std::uint64_t seed = 0;
  std::string point;
  std::string out;
};

ProbeReport run_verify(const VerifyArgs& a) {
  const std::vector<std::string> needs_phi = {"p_calm",        "prox_bounded", "sublevel", "single_valued",
                                              "holder",        "gradient",     "uniform_bounded"};
  std::optional<Objective> phi;
  if (std::find(needs_phi.begin(), needs_phi.end(), a.claim) != needs_phi.end())
    phi = objective_by_id(a.objective);
  ProxConfig cfg;
  cfg.p = a.p;
  cfg.gamma = a.gamma;
  cfg.seed = a.seed;
  auto point_or = [&](Vector fallback) {
    if (!a.point.empty()) {
      Vector v = to_vector(parse_point(a.point));
      if (v.size() != phi->dim()) throw std::invalid_argument("--point dimension does not match objective");
      return v;
    }
    return fallback;
  };
  auto default_point = [&] { return phi->xstar() ? *phi->xstar() : Vector(Vector::Zero(phi->dim())); };

  if (a.claim == "kappa") {
    ProbeReport rep;
    rep.claim = "kappa";
    const long n = std::max(2L, a.samples);
    for (long i = 0; i < n; ++i) {
      const double t = 1.0 + 1.0 * static_cast<double>(i + 1) / static_cast<double>(n);
      const KappaEval k = kappa(t);
      ++rep.samples;
      rep.margin.add(k.kappa);
      if (!(k.kappa > 0.0)) rep.add_violation({"positive", {t}, k.kappa, 0.0});
    }
    rep.details["t_hat"] = kappa_t_hat();
    rep.details["kappa_2"] = kappa(2.0).kappa;
    rep.details["branch_gap_at_t_hat"] = std::abs(kappa_linear(kappa_t_hat()) - kappa_exact(kappa_t_hat()));
    if (kappa(2.0).kappa != 1.0) rep.add_violation({"kappa(2)=1", {2.0}, kappa(2.0).kappa, 1.0});
    return rep;
  }
  if (a.claim == "basic_ineq") return verify_basic_ineq(a.p, a.samples, a.seed);
  if (a.claim == "lemma22") return verify_lemma22(a.p, a.r, a.samples, a.seed);
  if (a.claim == "p_calm") {
    CalmSampler s;
    s.seed = a.seed;
    s.global_samples = a.samples;
    return check_p_calm(*phi, point_or(default_point()), a.M, a.p, s);
  }
  if (a.claim == "prox_bounded") {
    RadiusSchedule s;
    s.seed = a.seed;
    ProxBoundReport r = check_prox_bounded(*phi, a.p, s);
    r.report.details["suspected_unbounded"] = r.suspected_unbounded ? 1.0 : 0.0;
    return r.report;
  }
  if (a.claim == "sublevel")
    return sublevel_containment(*phi, a.lambda, point_or(default_point()), a.r, cfg);
  if (a.claim == "single_valued") {
    const Vector c = point_or(default_point());
    Box box{c.array() - a.r, c.array() + a.r};
    GridSpec g;
    if (phi->dim() == 2) g.n_2d = 41;
    SingleValuedReport r = single_valuedness_probe(*phi, box, cfg, g);
    r.report.details["max_grad_jump"] = r.max_grad_jump;
    if (r.region)
      r.report.details["region_half_width"] = 0.5 * (r.region->hi - r.region->lo).minCoeff();
    return r.report;
  }
  if (a.claim == "holder") {
    HolderFitOptions o;
    o.seed = a.seed;
    const HolderFit fit = holder_fit(*phi, point_or(default_point()), cfg, static_cast<int>(a.samples), o);
    ProbeReport rep;
    rep.claim = "holder";
    rep.samples = fit.pairs;
    rep.details = {{"nu_hat", fit.nu_hat}, {"L_hat", fit.L_hat}, {"r_squared", fit.r_squared}};
    double nu = 0.0;
    try {
      nu = guaranteed_holder_exponent(a.p, a.q);
      rep.details["nu_guaranteed"] = nu;
      rep.margin.add(fit.nu_hat - nu);
      if (fit.nu_hat < nu - 0.1) rep.add_violation({"nu_hat >= guaranteed - 0.1", {}, fit.nu_hat, nu});
    } catch (const std::invalid_argument&) {
    }
    return rep;
  }
  if (a.claim == "gradient") {
    std::vector<Vector> pts;
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Vector c = point_or(Vector::Zero(phi->dim()));
    for (long i = 0; i < a.samples; ++i) {
      Vector x(phi->dim());
      for (int j = 0; j < phi->dim(); ++j) x[j] = c[j] + u(rng);
      pts.push_back(x);
    }
    return gradient_fd_check(*phi, pts, cfg);
  }
  if (a.claim == "uniform_bounded")
    return uniform_boundedness_probe(*phi, point_or(default_point()), a.M, cfg, a.eps,
                                     static_cast<int>(a.samples), a.seed);
  throw std::invalid_argument("unknown claim '" + a.claim + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order proximal-point benchmark and verification tool"};
  app.require_subcommand(1);

  RunOverrides ro;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("config", ro.config, "Config file (JSON)");
  run->add_option("--solver", ro.solver, "Solver id: hippa, nm, sg-dss, sg-gss");
  run->add_option("--objective", ro.objective, "Objective id");
  run->add_option("--p", ro.p, "Regularization order p > 1");
  run->add_option("--gamma", ro.gamma, "Envelope parameter gamma > 0");
  run->add_option("--eps", ro.eps, "HiPPA step tolerance");
  run->add_option("--budget", ro.budget, "Oracle evaluation budget");
  run->add_option("--seed", ro.seed, "Random seed");
  run->add_option("--out", ro.out, "Report path (JSON)");

  std::string preset_out;
  std::vector<CLI::App*> presets;
  for (const auto& name : preset_names()) {
    auto* sc = app.add_subcommand(name, "Reproduce the '" + name + "' experiment");
    sc->add_option("--out", preset_out, "Report path (JSON)");
    presets.push_back(sc);
  }

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Numerically probe a theoretical claim");
  verify->add_option("claim", va.claim, "kappa | basic_ineq | lemma22 | p_calm | prox_bounded | sublevel | "
                                         "single_valued | holder | gradient | uniform_bounded")
      ->required()
      ->check(CLI::IsMember({"kappa", "basic_ineq", "lemma22", "p_calm", "prox_bounded", "sublevel",
                             "single_valued", "holder", "gradient", "uniform_bounded"}));
  verify->add_option("--objective", va.objective, "Objective id");
  verify->add_option("--p", va.p, "Order p");
  verify->add_option("--gamma", va.gamma, "Envelope parameter gamma");
  verify->add_option("--r", va.r, "Radius");
  verify->add_option("--M", va.M, "Calmness constant");
  verify->add_option("--q", va.q, "Prox-regularity order");
  verify->add_option("--eps", va.eps, "Tolerance for uniform_bounded");
  verify->add_option("--lambda", va.lambda, "Level for sublevel");
  verify->add_option("--samples", va.samples, "Sample count");
  verify->add_option("--seed", va.seed, "Random seed");
  verify->add_option("--point", va.point, "Comma-separated reference point");
  verify->add_option("--out", va.out, "Write the probe report (JSON)");

  std::string report_path, format = "csv", out_dir;
  auto* exp = app.add_subcommand("export", "Export per-iterate traces from a report");
  exp->add_option("report", report_path, "Report file")->required();
  exp->add_option("--format", format, "csv | records")->check(CLI::IsMember({"csv", "records"}));
  exp->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (run->parsed()) {
      ExperimentConfig cfg;
      try {
        cfg = build_config(ro);
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
      }
      return finish_experiment(run_experiment(cfg), ro.out);
    }
    for (auto* sc : presets) {
      if (!sc->parsed()) continue;
      Report rep = run_experiment(preset(sc->get_name()));
      apply_preset_checks(rep);
      return finish_experiment(std::move(rep), preset_out);
    }
    if (verify->parsed()) {
      ProbeReport rep;
      try {
        rep = run_verify(va);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
      }
      const json j = to_json(rep);
      if (!va.out.empty()) {
        std::ofstream f(va.out);
        if (!f) throw std::runtime_error("cannot write '" + va.out + "'");
        f << j.dump(2) << "\n";
      }
      std::cout << j.dump(2) << "\n";
      return rep.pass() ? kExitPass : kExitFail;
    }
    if (exp->parsed()) {
      const Report rep = read_report(report_path);
      const auto files = export_traces(rep, parse_trace_format(format), out_dir);
      for (const auto& f : files) std::cout << f.string() << "\n";
      return kExitPass;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
