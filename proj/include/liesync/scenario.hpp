#pragma once

#include <map>
#include <optional>

#include "liesync/pls.hpp"

namespace liesync {

// Process exit codes shared by the CLI and the scenario runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitChartViolation = 3;
inline constexpr int kExitVerifyFailure = 4;
inline constexpr int kExitSolverFailure = 5;

struct VerifyBlock {
    std::string name;
    std::string check;  // registered check id
    double tol = 1e-6;
    std::map<std::string, std::string> params;
};

/// Declarative description of one run: group, model, initial data,
/// integrator, outputs, and named verification blocks. Parsed from an
/// INI-style plain-text file with [section] headers and key = value lines;
/// numeric literals are kept as decimal strings until typed here.
struct Scenario {
    std::string name;

    std::string group_id = "circle";
    int dim = 1;
    int particles = 2;
    double kappa = 1.0;
    std::string phi_id = "kuramoto_sin";
    std::string metric_id = "adapted";  // adapted | frobenius (diagnostics norm)

    enum class HamMode { Zero, Random, RandomIdentical, Frequencies, Explicit };
    HamMode ham_mode = HamMode::Zero;
    std::uint64_t ham_seed = 0;
    double ham_norm = 0.0;
    std::vector<double> frequencies;  // circle shortcut: H_i = i*nu_i
    std::vector<Mat> ham_explicit;

    enum class InitMode { Identity, Random, Phases, Explicit };
    InitMode init_mode = InitMode::Identity;
    std::uint64_t init_seed = 0;
    double init_radius = 0.0;
    std::vector<double> phases;  // circle: X_i = exp(i theta_i)
    std::vector<Mat> init_explicit;
    double rescale_frobenius_diameter = 0.0;  // 0 disables
    double rescale_ratio_deviation = 0.0;     // 0 disables

    IntegratorConfig config;
    bool dt_given = false;  // when false, dt = 1e-3 * min(1, 1/kappa)

    std::string trajectory_path;
    std::string diagnostics_path;
    std::string summary_path;
    std::string output_format = "csv";  // csv | binary

    std::vector<VerifyBlock> verify;
};

/// Parses and validates; throws ConfigError with line references.
Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& name);

/// Catalog + interaction + Hamiltonians + adapted metric from the scenario.
ModelSpec build_model(const Scenario& scenario);

/// Initial ensemble (deterministic in the scenario seeds).
EnsembleState build_initial(const Scenario& scenario, const ModelSpec& spec);

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;   // worst observed value of the check quantity
    double threshold = 0.0;  // what it was compared against
    std::string detail;
};

struct RunResult {
    int exit_code = kExitOk;
    Trajectory trajectory;
    std::vector<CheckResult> checks;
    ModelSpec spec;
};

/// Integrates, writes trajectory/diagnostics/summary artifacts (paths
/// resolved against out_dir), and evaluates the verify blocks.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Evaluates one registered check against a finished run.
CheckResult evaluate_check(const VerifyBlock& block, const ModelSpec& spec,
                           const Scenario& scenario, const Trajectory& traj);

}  // namespace liesync
