#ifndef HIPPA_BENCH_HPP
#define HIPPA_BENCH_HPP

#include "hippa/analysis.hpp"
#include "hippa/core.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hippa {

inline constexpr int kReportSchemaVersion = 1;

/// |x - x*| / max(1, |x*|). Throws std::invalid_argument if phi has no
/// known minimizer.
double relative_error(const Vector& x, const Objective& phi);

enum class BudgetMode { evals, wallclock };

/// One solver and its parameters. Fields that do not apply to `id` are ignored.
struct SolverSpec {
  std::string id = "hippa";  // hippa | nm | sg-dss | sg-gss
  std::string label;         // defaults to a name derived from id and parameters
  double p = 2.0;
  double gamma = 1.0;
  double eps = 1e-6;
  double alpha = 0.98;
  double rho = 0.98;
  double tol = 1e-10;
  long max_iter = 10000000;
  int n_starts = 8;
  int inner_restarts = 0;
  long inner_budget = 4000;
  double inner_tol = 1e-10;

  std::string display_label() const;
};

struct ExperimentConfig {
  std::string name;
  std::string objective = "ncr1";
  std::vector<SolverSpec> solvers{SolverSpec{}};
  std::vector<Vector> inits;  // explicit initial points
  int random_inits = 0;       // extra points drawn uniformly from [box_lo, box_hi]^n
  double box_lo = -4.0;
  double box_hi = 4.0;
  std::uint64_t seed = 0;
  BudgetMode budget_mode = BudgetMode::evals;
  long eval_budget = 50000;
  double wallclock_seconds = 0.1;

  /// Throws std::invalid_argument on unknown ids or bad values.
  void validate() const;
  /// Explicit inits followed by the seeded random ones.
  std::vector<Vector> initial_points() const;
  RunLimits limits() const;
};

/// Flat keys (objective, solver, p, gamma, eps, alpha, rho, tol, max_iter,
/// n_starts, inner_restarts, inner_budget, inner_tol, label, inits,
/// random_inits, box, seed, budget_mode, budget, wallclock, name) describe a
/// single solver; an optional "solvers" array of objects with the solver keys
/// lists several, each inheriting the top-level values. Unknown keys throw.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunRecord {
  std::string objective;
  std::string solver;  // solver id
  std::string label;
  int solver_index = 0;
  int init_index = 0;
  Vector init;
  Vector x_final;
  double f_final = 0.0;
  std::optional<double> rel_error;
  long iterations = 0;
  long evals = 0;
  std::optional<double> elapsed;  // only in wall-clock mode
  std::string status;
  std::optional<double> iteration_bound;
  std::optional<double> criticality;
  std::optional<double> criticality_bound;
  std::map<std::string, bool> flags;
  std::string trace_file;  // relative to the report file
  Trace trace;             // not serialized in the report itself

  std::string run_id() const;
  bool pass() const;
};

struct Report {
  int schema_version = kReportSchemaVersion;
  ExperimentConfig config;
  std::vector<RunRecord> runs;
  std::map<std::string, bool> flags;  // experiment-level checks

  bool pass() const;
};

/// Runs every (solver, init) pair on a worker pool of worker_count()
/// threads. Records are ordered by (solver index, init index), so the report
/// is deterministic for a fixed config in evaluation-budget mode.
Report run_experiment(const ExperimentConfig& cfg);

/// Canned experiments: table1, fig4, trap. Throws on unknown names.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();
/// Adds the experiment-level flags the preset is meant to demonstrate.
void apply_preset_checks(Report& report);

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);

/// Writes `path` and one trace file per run (records format) next to it in
/// <stem>.traces/. Throws std::runtime_error on I/O failure.
void write_report(Report& report, const std::filesystem::path& path);
/// Reads a report and, when present, the trace files it references.
/// Throws std::runtime_error on unknown schema versions or I/O failure.
Report read_report(const std::filesystem::path& path);

enum class TraceFormat { csv, records };

TraceFormat parse_trace_format(const std::string& s);
const char* to_string(TraceFormat f);

/// Column names: k, x0..x{n-1}, f, env, step, relerr, evals.
std::vector<std::string> trace_columns(int dim);

/// Writes one file per run into `dir` (<run_id>.csv or <run_id>.jsonl); an
/// empty report yields a single header-only traces file. Numbers use 17
/// significant digits. Returns the files written.
std::vector<std::filesystem::path> export_traces(const Report& report, TraceFormat format,
                                                 const std::filesystem::path& dir);

/// Parses a file written by export_traces back into rows of doubles (NaN
/// for empty / null cells). The first element is the header.
std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_trace_file(
    const std::filesystem::path& file);

nlohmann::json to_json(const ProbeReport& report);

}  // namespace hippa

#endif  // HIPPA_BENCH_HPP
