#include "hippa/bench.hpp"

#include "hippa/baselines.hpp"
#include "hippa/hippa.hpp"
#include "hippa/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hippa {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector json_vec(const json& j) {
  const auto xs = j.get<std::vector<double>>();
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = xs[i];
  return v;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> json_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

const std::set<std::string> kSolverKeys = {"solver", "label", "p", "gamma", "eps", "alpha", "rho",
                                           "tol", "max_iter", "n_starts", "inner_restarts",
                                           "inner_budget", "inner_tol"};
const std::set<std::string> kTopKeys = {"name", "objective", "inits", "random_inits", "box", "seed",
                                        "budget_mode", "budget", "wallclock", "solvers"};

void read_solver_keys(const json& j, SolverSpec& s) {
  if (j.contains("solver")) s.id = j.at("solver").get<std::string>();
  if (j.contains("label")) s.label = j.at("label").get<std::string>();
  if (j.contains("p")) s.p = j.at("p").get<double>();
  if (j.contains("gamma")) s.gamma = j.at("gamma").get<double>();
  if (j.contains("eps")) s.eps = j.at("eps").get<double>();
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  if (j.contains("rho")) s.rho = j.at("rho").get<double>();
  if (j.contains("tol")) s.tol = j.at("tol").get<double>();
  if (j.contains("max_iter")) s.max_iter = j.at("max_iter").get<long>();
  if (j.contains("n_starts")) s.n_starts = j.at("n_starts").get<int>();
  if (j.contains("inner_restarts")) s.inner_restarts = j.at("inner_restarts").get<int>();
  if (j.contains("inner_budget")) s.inner_budget = j.at("inner_budget").get<long>();
  if (j.contains("inner_tol")) s.inner_tol = j.at("inner_tol").get<double>();
}

json solver_json(const SolverSpec& s) {
  return json{{"solver", s.id},          {"label", s.label},
              {"p", s.p},                {"gamma", s.gamma},
              {"eps", s.eps},            {"alpha", s.alpha},
              {"rho", s.rho},            {"tol", s.tol},
              {"max_iter", s.max_iter},  {"n_starts", s.n_starts},
              {"inner_restarts", s.inner_restarts}, {"inner_budget", s.inner_budget},
              {"inner_tol", s.inner_tol}};
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return out;
}

ProxConfig prox_config(const SolverSpec& s, std::uint64_t seed) {
  ProxConfig c;
  c.p = s.p;
  c.gamma = s.gamma;
  c.n_starts = s.n_starts;
  c.inner_restarts = s.inner_restarts;
  c.inner_budget = s.inner_budget;
  c.inner_tol = s.inner_tol;
  c.seed = seed;
  return c;
}

RunRecord run_one(const Objective& phi, const ExperimentConfig& cfg, int si, int ii, const Vector& x0) {
  const SolverSpec& s = cfg.solvers[si];
  const RunLimits limits = cfg.limits();
  RunRecord r;
  r.objective = cfg.objective;
  r.solver = s.id;
  r.label = s.display_label();
  r.solver_index = si;
  r.init_index = ii;
  r.init = x0;

  if (s.id == "hippa") {
    const std::uint64_t seed = cfg.seed + 1000003ULL * static_cast<std::uint64_t>(ii) +
                               7919ULL * static_cast<std::uint64_t>(si);
    const ProxConfig pc = prox_config(s, seed);
    try {
      HippaResult h = run_hippa(phi, x0, pc, s.eps, s.max_iter, limits);
      r.trace = std::move(h.trace);
      r.iterations = h.iterations;
      r.evals = h.evals;
      r.status = to_string(h.stop_reason);
      r.iteration_bound = h.iter_bound;
      if (h.iterations > 0) r.criticality = h.criticality;
      r.criticality_bound = h.criticality_bound;
      const ChainCheck chain = check_monotonicity(r.trace);
      r.flags["monotone"] = chain.ok();
      r.flags["summable"] = summability_holds(r.trace, s.p, s.gamma);
      if (h.iter_bound) r.flags["within_iteration_bound"] = h.iterations <= *h.iter_bound;
      if (h.stop_reason == StopReason::step_tol)
        r.flags["criticality_certified"] = h.criticality <= h.criticality_bound * (1.0 + 1e-12);
    } catch (const UnboundedEnvelopeError&) {
      r.trace.push(x0, phi.value(x0), kNaN, 1, 0.0);
      r.evals = 1;
      r.status = "unbounded";
      r.flags["prox_bounded"] = false;
    }
  } else {
    BaselineRun b;
    if (s.id == "nm") {
      const long budget = limits.eval_budget > 0 ? limits.eval_budget : std::numeric_limits<long>::max();
      b = run_nm_direct(phi, x0, s.tol, budget, limits);
    } else if (s.id == "sg-dss") {
      b = run_sg_dss(phi, x0, s.alpha, s.max_iter, limits);
    } else {
      b = run_sg_gss(phi, x0, s.rho, s.max_iter, limits);
    }
    r.trace = std::move(b.trace);
    r.iterations = b.iterations;
    r.evals = b.evals;
    r.status = to_string(b.status);
  }

  r.x_final = r.trace.iterates.back();
  r.f_final = r.trace.f_values.back();
  if (phi.xstar()) r.rel_error = relative_error(r.x_final, phi);
  if (cfg.budget_mode == BudgetMode::wallclock) r.elapsed = r.trace.elapsed.back();
  if (limits.eval_budget > 0) r.flags["budget_respected"] = r.evals <= limits.eval_budget;
  return r;
}

const RunRecord* find_run(const Report& rep, const std::string& solver, int init) {
  for (const auto& r : rep.runs)
    if (r.solver == solver && r.init_index == init) return &r;
  return nullptr;
}

double dist_to(const Vector& x, double a, double b) {
  Vector t(2);
  t << a, b;
  return x.size() == 2 ? (x - t).norm() : kInf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Row values in trace_columns order.
std::vector<double> trace_row(const RunRecord& r, std::size_t k, const Objective* phi) {
  const Trace& t = r.trace;
  std::vector<double> row{static_cast<double>(k)};
  const Vector& x = t.iterates[k];
  row.insert(row.end(), x.data(), x.data() + x.size());
  row.push_back(t.f_values[k]);
  row.push_back(t.env_values[k]);
  row.push_back(k == 0 ? kNaN : t.step_norms[k - 1]);
  row.push_back(phi && phi->xstar() ? relative_error(x, *phi) : kNaN);
  row.push_back(static_cast<double>(t.eval_counts[k]));
  return row;
}

std::string csv_cell(double v) { return std::isnan(v) ? std::string() : fmt17(v); }

std::string record_cell(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  return fmt17(v);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string render_trace(const RunRecord* r, int dim, TraceFormat format, const Objective* phi) {
  const auto cols = trace_columns(dim);
  std::string out;
  if (format == TraceFormat::csv) {
    out = join(cols, ",") + "\n";
  } else {
    out = json{{"columns", cols}}.dump() + "\n";
  }
  if (!r) return out;
  for (std::size_t k = 0; k < r->trace.size(); ++k) {
    const auto row = trace_row(*r, k, phi);
    std::vector<std::string> cells;
    for (double v : row) cells.push_back(format == TraceFormat::csv ? csv_cell(v) : record_cell(v));
    out += format == TraceFormat::csv ? join(cells, ",") : "[" + join(cells, ",") + "]";
    out += "\n";
  }
  return out;
}

Trace trace_from_rows(const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
  const int dim = static_cast<int>(cols.size()) - 6;
  if (dim < 1) throw std::runtime_error("trace file has too few columns");
  Trace t;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim + 6) throw std::runtime_error("trace row has wrong width");
    Vector x(dim);
    for (int j = 0; j < dim; ++j) x[j] = row[1 + j];
    t.iterates.push_back(x);
    t.f_values.push_back(row[1 + dim]);
    t.env_values.push_back(row[2 + dim]);
    if (t.iterates.size() > 1) t.step_norms.push_back(row[3 + dim]);
    t.eval_counts.push_back(static_cast<long>(row[5 + dim]));
    t.elapsed.push_back(0.0);
  }
  return t;
}

}  // namespace

double relative_error(const Vector& x, const Objective& phi) {
  if (!phi.xstar()) throw std::invalid_argument("relative_error: '" + phi.name() + "' has no known minimizer");
  const Vector& xs = *phi.xstar();
  if (x.size() != xs.size()) throw std::invalid_argument("relative_error: dimension mismatch");
  return (x - xs).norm() / std::max(1.0, xs.norm());
}

std::string SolverSpec::display_label() const {
  if (!label.empty()) return label;
  if (id == "hippa") return "hippa_p" + short_num(p) + "_g" + short_num(gamma);
  if (id == "sg-dss") return "sg-dss_a" + short_num(alpha);
  if (id == "sg-gss") return "sg-gss_r" + short_num(rho);
  return id;
}

void ExperimentConfig::validate() const {
  const Objective phi = objective_by_id(objective);
  if (solvers.empty()) throw std::invalid_argument("config: no solvers");
  for (const auto& s : solvers) {
    if (s.id == "hippa") {
      prox_config(s, 0).validate();
      if (!(s.eps > 0.0)) throw std::invalid_argument("config: eps must be > 0");
    } else if (s.id == "nm") {
      if (!(s.tol > 0.0)) throw std::invalid_argument("config: tol must be > 0");
    } else if (s.id == "sg-dss" || s.id == "sg-gss") {
      if (!phi.has_subgrad())
        throw std::invalid_argument("config: '" + objective + "' has no subgradient oracle for " + s.id);
      if (s.id == "sg-dss" && !(s.alpha > 0.0)) throw std::invalid_argument("config: alpha must be > 0");
      if (s.id == "sg-gss" && !(s.rho > 0.0 && s.rho < 1.0))
        throw std::invalid_argument("config: rho must lie in (0, 1)");
    } else {
      throw std::invalid_argument("config: unknown solver id '" + s.id + "'");
    }
    if (s.max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
  }
  for (const auto& x : inits)
    if (x.size() != phi.dim()) throw std::invalid_argument("config: init dimension does not match objective");
  if (random_inits < 0) throw std::invalid_argument("config: random_inits must be >= 0");
  if (!(box_lo < box_hi)) throw std::invalid_argument("config: box must satisfy lo < hi");
  if (inits.empty() && random_inits == 0) throw std::invalid_argument("config: no initial points");
  if (budget_mode == BudgetMode::evals && eval_budget < 1)
    throw std::invalid_argument("config: budget must be >= 1");
  if (budget_mode == BudgetMode::wallclock && !(wallclock_seconds > 0.0))
    throw std::invalid_argument("config: wallclock must be > 0");
}

std::vector<Vector> ExperimentConfig::initial_points() const {
  std::vector<Vector> pts = inits;
  const int dim = objective_by_id(objective).dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(box_lo, box_hi);
  for (int i = 0; i < random_inits; ++i) {
    Vector x(dim);
    for (int j = 0; j < dim; ++j) x[j] = u(rng);
    pts.push_back(x);
  }
  return pts;
}

RunLimits ExperimentConfig::limits() const {
  if (budget_mode == BudgetMode::evals) return {eval_budget, 0.0};
  return {0, wallclock_seconds};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kTopKeys.count(key) && !kSolverKeys.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "'");
  ExperimentConfig c;
  try {
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    if (j.contains("objective")) c.objective = j.at("objective").get<std::string>();
    if (j.contains("inits"))
      for (const auto& x : j.at("inits")) c.inits.push_back(json_vec(x));
    if (j.contains("random_inits")) c.random_inits = j.at("random_inits").get<int>();
    if (j.contains("box")) {
      const auto b = j.at("box").get<std::vector<double>>();
      if (b.size() != 2) throw std::invalid_argument("config: box must be [lo, hi]");
      c.box_lo = b[0];
      c.box_hi = b[1];
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("budget_mode")) {
      const auto m = j.at("budget_mode").get<std::string>();
      if (m == "evals") c.budget_mode = BudgetMode::evals;
      else if (m == "wallclock") c.budget_mode = BudgetMode::wallclock;
      else throw std::invalid_argument("config: budget_mode must be 'evals' or 'wallclock'");
    }
    if (j.contains("budget")) c.eval_budget = j.at("budget").get<long>();
    if (j.contains("wallclock")) c.wallclock_seconds = j.at("wallclock").get<double>();

    SolverSpec base;
    read_solver_keys(j, base);
    c.solvers.clear();
    if (j.contains("solvers")) {
      for (const auto& sj : j.at("solvers")) {
        if (!sj.is_object()) throw std::invalid_argument("config: solvers entries must be objects");
        for (const auto& [key, _] : sj.items())
          if (!kSolverKeys.count(key)) throw std::invalid_argument("config: unknown solver key '" + key + "'");
        SolverSpec s = base;
        s.label.clear();
        read_solver_keys(sj, s);
        c.solvers.push_back(s);
      }
    } else {
      c.solvers.push_back(base);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json inits = json::array();
  for (const auto& x : c.inits) inits.push_back(vec_json(x));
  json solvers = json::array();
  for (const auto& s : c.solvers) solvers.push_back(solver_json(s));
  return json{{"name", c.name},
              {"objective", c.objective},
              {"inits", inits},
              {"random_inits", c.random_inits},
              {"box", {c.box_lo, c.box_hi}},
              {"seed", c.seed},
              {"budget_mode", c.budget_mode == BudgetMode::evals ? "evals" : "wallclock"},
              {"budget", c.eval_budget},
              {"wallclock", c.wallclock_seconds},
              {"solvers", solvers}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

std::string RunRecord::run_id() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", solver_index);
  std::string id = std::string(buf) + "_" + sanitize(label) + "_init";
  std::snprintf(buf, sizeof buf, "%02d", init_index);
  return id + buf;
}

bool RunRecord::pass() const {
  return std::all_of(flags.begin(), flags.end(), [](const auto& kv) { return kv.second; });
}

bool Report::pass() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.pass(); }) &&
         std::all_of(flags.begin(), flags.end(), [](const auto& kv) { return kv.second; });
}

Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Objective phi = objective_by_id(cfg.objective);
  const auto inits = cfg.initial_points();
  const std::size_t ns = cfg.solvers.size(), ni = inits.size();

  Report rep;
  rep.config = cfg;
  rep.runs.resize(ns * ni);
  parallel_for(
      ns * ni,
      [&](std::size_t t) {
        const int si = static_cast<int>(t / ni), ii = static_cast<int>(t % ni);
        rep.runs[t] = run_one(phi, cfg, si, ii, inits[ii]);
      },
      worker_count());
  return rep;
}

std::vector<std::string> preset_names() { return {"table1", "fig4", "trap"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.budget_mode = BudgetMode::evals;
  c.eval_budget = 50000;
  auto pt = [](double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
  };
  if (name == "table1") {
    c.objective = "ncr1";
    c.inits = {pt(3.57, 2.76), pt(-1.34, 3.03), pt(0.72, -0.06), pt(-1.21, -1.11), pt(-1.09, 0.03)};
    SolverSpec nm;
    nm.id = "nm";
    SolverSpec h;
    h.id = "hippa";
    h.p = 2.0;
    h.gamma = 50.0;
    h.eps = 1e-12;
    h.n_starts = 2;
    h.inner_restarts = 2;
    SolverSpec sg;
    sg.id = "sg-dss";
    sg.alpha = 0.98;
    c.solvers = {nm, h, sg};
  } else if (name == "fig4") {
    c.objective = "ncr1";
    c.inits = {pt(-1.0, 1.0)};
    c.solvers.clear();
    for (double p : {1.5, 2.0, 2.5, 3.0, 10.0, 100.0}) {
      SolverSpec h;
      h.id = "hippa";
      h.p = p;
      h.gamma = 50.0;
      h.eps = 1e-12;
      h.n_starts = 2;
      c.solvers.push_back(h);
    }
  } else if (name == "trap") {
    c.objective = "ncr2";
    c.inits = {pt(-2.48, 0.58)};
    SolverSpec h;
    h.id = "hippa";
    h.p = 1.25;
    h.gamma = 9.1;
    h.eps = 1e-6;
    SolverSpec g;
    g.id = "sg-gss";
    g.rho = 0.98;
    c.solvers = {h, g};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return c;
}

void apply_preset_checks(Report& rep) {
  const auto& name = rep.config.name;
  const int ni = static_cast<int>(rep.config.initial_points().size());
  if (name == "table1") {
    bool h_ok = true, nm_ok = true, sg_ok = true, smallest = true;
    for (int i = 0; i < ni; ++i) {
      const RunRecord* h = find_run(rep, "hippa", i);
      const RunRecord* nm = find_run(rep, "nm", i);
      const RunRecord* sg = find_run(rep, "sg-dss", i);
      if (!h || !nm || !sg || !h->rel_error || !nm->rel_error || !sg->rel_error) {
        h_ok = nm_ok = sg_ok = smallest = false;
        break;
      }
      h_ok = h_ok && *h->rel_error <= 1e-6;
      nm_ok = nm_ok && *nm->rel_error <= 1e-5;
      sg_ok = sg_ok && *sg->rel_error >= 1e-2;
      smallest = smallest && *h->rel_error < *nm->rel_error && *h->rel_error < *sg->rel_error;
    }
    rep.flags["hippa_relerr_le_1e-6"] = h_ok;
    rep.flags["nm_relerr_le_1e-5"] = nm_ok;
    rep.flags["sg_dss_relerr_ge_1e-2"] = sg_ok;
    rep.flags["hippa_smallest_per_row"] = smallest;
  } else if (name == "fig4") {
    double best = kInf, at25 = kInf, at15 = kInf;
    for (const auto& r : rep.runs) {
      if (r.solver != "hippa" || !r.rel_error) continue;
      const double p = rep.config.solvers[r.solver_index].p;
      best = std::min(best, *r.rel_error);
      if (p == 2.5) at25 = *r.rel_error;
      if (p == 1.5) at15 = *r.rel_error;
    }
    rep.flags["p2.5_within_100x_of_best"] = std::isfinite(at25) && at25 <= 100.0 * best;
    rep.flags["p2.5_beats_p1.5"] = at25 < at15;
  } else if (name == "trap") {
    const RunRecord* h = find_run(rep, "hippa", 0);
    const RunRecord* g = find_run(rep, "sg-gss", 0);
    rep.flags["hippa_within_1e-3_of_minimizer"] = h && dist_to(h->x_final, 1.0, 1.0) <= 1e-3;
    rep.flags["sg_gss_within_0.05_of_trap"] = g && dist_to(g->x_final, 0.0, -1.0) <= 0.05;
  }
}

json to_json(const Report& rep) {
  json runs = json::array();
  for (const auto& r : rep.runs) {
    runs.push_back(json{{"objective", r.objective},
                        {"solver", r.solver},
                        {"label", r.label},
                        {"solver_index", r.solver_index},
                        {"init_index", r.init_index},
                        {"init", vec_json(r.init)},
                        {"x_final", vec_json(r.x_final)},
                        {"f_final", r.f_final},
                        {"rel_error", opt_json(r.rel_error)},
                        {"iterations", r.iterations},
                        {"evals", r.evals},
                        {"elapsed", opt_json(r.elapsed)},
                        {"status", r.status},
                        {"iteration_bound", opt_json(r.iteration_bound)},
                        {"criticality", opt_json(r.criticality)},
                        {"criticality_bound", opt_json(r.criticality_bound)},
                        {"flags", r.flags},
                        {"pass", r.pass()},
                        {"trace_file", r.trace_file}});
  }
  return json{{"schema_version", rep.schema_version},
              {"config", to_json(rep.config)},
              {"runs", runs},
              {"flags", rep.flags},
              {"pass", rep.pass()}};
}

Report report_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version"))
    throw std::runtime_error("report: missing schema_version");
  const int version = j.at("schema_version").get<int>();
  if (version != kReportSchemaVersion)
    throw std::runtime_error("report: unsupported schema_version " + std::to_string(version));
  Report rep;
  try {
    rep.config = config_from_json(j.at("config"));
    for (const auto& rj : j.at("runs")) {
      RunRecord r;
      r.objective = rj.at("objective").get<std::string>();
      r.solver = rj.at("solver").get<std::string>();
      r.label = rj.at("label").get<std::string>();
      r.solver_index = rj.at("solver_index").get<int>();
      r.init_index = rj.at("init_index").get<int>();
      r.init = json_vec(rj.at("init"));
      r.x_final = json_vec(rj.at("x_final"));
      r.f_final = rj.at("f_final").is_null() ? kNaN : rj.at("f_final").get<double>();
      r.rel_error = json_opt(rj, "rel_error");
      r.iterations = rj.at("iterations").get<long>();
      r.evals = rj.at("evals").get<long>();
      r.elapsed = json_opt(rj, "elapsed");
      r.status = rj.at("status").get<std::string>();
      r.iteration_bound = json_opt(rj, "iteration_bound");
      r.criticality = json_opt(rj, "criticality");
      r.criticality_bound = json_opt(rj, "criticality_bound");
      r.flags = rj.at("flags").get<std::map<std::string, bool>>();
      r.trace_file = rj.value("trace_file", "");
      rep.runs.push_back(std::move(r));
    }
    rep.flags = j.at("flags").get<std::map<std::string, bool>>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("report: ") + e.what());
  }
  return rep;
}

void write_report(Report& rep, const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  const fs::path traces = dir / (path.stem().string() + ".traces");
  std::error_code ec;
  fs::create_directories(traces, ec);
  if (ec) throw std::runtime_error("cannot create '" + traces.string() + "': " + ec.message());
  const Objective phi = objective_by_id(rep.config.objective);
  for (auto& r : rep.runs) {
    const std::string file = r.run_id() + ".jsonl";
    write_text(traces / file, render_trace(&r, phi.dim(), TraceFormat::records, &phi));
    r.trace_file = (fs::path(traces.filename()) / file).generic_string();
  }
  write_text(path, to_json(rep).dump(2) + "\n");
}

Report read_report(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("report '" + path.string() + "': " + e.what());
  }
  Report rep = report_from_json(j);
  const auto dir = path.parent_path();
  for (auto& r : rep.runs) {
    if (r.trace_file.empty()) continue;
    const auto file = dir / r.trace_file;
    if (!std::filesystem::exists(file)) continue;
    const auto [cols, rows] = read_trace_file(file);
    r.trace = trace_from_rows(cols, rows);
  }
  return rep;
}

TraceFormat parse_trace_format(const std::string& s) {
  if (s == "csv") return TraceFormat::csv;
  if (s == "records") return TraceFormat::records;
  throw std::invalid_argument("unknown trace format '" + s + "' (expected csv or records)");
}

const char* to_string(TraceFormat f) { return f == TraceFormat::csv ? "csv" : "records"; }

std::vector<std::string> trace_columns(int dim) {
  std::vector<std::string> cols{"k"};
  for (int j = 0; j < dim; ++j) cols.push_back("x" + std::to_string(j));
  for (const char* c : {"f", "env", "step", "relerr", "evals"}) cols.emplace_back(c);
  return cols;
}

std::vector<std::filesystem::path> export_traces(const Report& rep, TraceFormat format,
                                                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  const Objective phi = objective_by_id(rep.config.objective);
  const std::string ext = format == TraceFormat::csv ? ".csv" : ".jsonl";
  std::vector<std::filesystem::path> files;
  if (rep.runs.empty()) {
    files.push_back(dir / ("traces" + ext));
    write_text(files.back(), render_trace(nullptr, phi.dim(), format, &phi));
    return files;
  }
  for (const auto& r : rep.runs) {
    if (r.trace.size() == 0) throw std::runtime_error("export_traces: run " + r.run_id() + " has no trace");
    files.push_back(dir / (r.run_id() + ext));
    write_text(files.back(), render_trace(&r, static_cast<int>(r.trace.iterates.front().size()), format, &phi));
  }
  return files;
}

std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_trace_file(
    const std::filesystem::path& file) {
  std::istringstream in(read_text(file));
  std::string line;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;
  const bool csv = file.extension() == ".csv";
  if (!std::getline(in, line)) throw std::runtime_error("'" + file.string() + "' is empty");
  if (csv) {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  } else {
    cols = json::parse(line).at("columns").get<std::vector<std::string>>();
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    if (csv) {
      std::size_t start = 0;
      for (;;) {
        const std::size_t end = line.find(',', start);
        const std::string cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
        row.push_back(cell.empty() ? kNaN : std::strtod(cell.c_str(), nullptr));
        if (end == std::string::npos) break;
        start = end + 1;
      }
    } else {
      for (const auto& v : json::parse(line)) {
        if (v.is_null()) row.push_back(kNaN);
        else if (v.is_string()) row.push_back(v.get<std::string>() == "inf" ? kInf : -kInf);
        else row.push_back(v.get<double>());
      }
    }
    if (row.size() != cols.size()) throw std::runtime_error("'" + file.string() + "': ragged row");
    rows.push_back(std::move(row));
  }
  return {cols, rows};
}

json to_json(const ProbeReport& rep) {
  json violations = json::array();
  for (const auto& w : rep.violations)
    violations.push_back(json{{"part", w.part}, {"point", w.point}, {"lhs", w.lhs}, {"rhs", w.rhs}});
  return json{{"claim", rep.claim},
              {"samples", rep.samples},
              {"violation_count", rep.violation_count},
              {"pass", rep.pass()},
              {"violations", violations},
              {"margin",
               {{"count", rep.margin.count},
                {"min", rep.margin.min},
                {"max", rep.margin.max},
                {"mean", rep.margin.mean}}},
              {"details", rep.details}};
}

}  // namespace hippa
