#include <cstdio>
#include <cstdlib>
#include <future>

#include <CLI11.hpp>

#include "liesync/analysis.hpp"
#include "liesync/errors.hpp"
#include "liesync/suites.hpp"

using namespace liesync;

namespace {

std::string default_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    const char* env = std::getenv("LIESYNC_OUT");
    return env != nullptr ? std::string(env) : std::string("out");
}

void print_checks(const std::vector<CheckResult>& checks) {
    for (const auto& check : checks) {
        std::printf("  [%s] %s: %s\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                    check.detail.c_str());
    }
}

int cmd_run(const std::string& scenario_path, const std::string& out,
            std::optional<std::uint64_t> seed_override, const std::string& format) {
    Scenario scenario = parse_scenario_file(scenario_path);
    if (!format.empty()) scenario.output_format = format;
    RunResult result = run_scenario(scenario, default_out_dir(out), seed_override);
    if (result.trajectory.event.has_value()) {
        const auto& event = *result.trajectory.event;
        std::printf("event: %s at t = %.6f (%s)\n",
                    event.kind == TerminationEvent::Kind::Blowup ? "blowup" : "chart violation",
                    event.t, event.detail.c_str());
    }
    print_checks(result.checks);
    std::printf("recorded %zu states, exit code %d\n", result.trajectory.states.size(),
                result.exit_code);
    return result.exit_code;
}

int cmd_verify(const std::vector<std::string>& names, const std::string& out,
               const std::string& scenario_dir) {
    std::vector<std::string> selected = names;
    if (selected.size() == 1 && selected[0] == "all") selected = suite_names();
    bool all_pass = true;
    for (const auto& name : selected) {
        SuiteReport report = run_suite(name, default_out_dir(out), scenario_dir);
        std::printf("suite %s:\n", report.suite.c_str());
        print_checks(report.results);
        all_pass = all_pass && report.all_pass();
    }
    return all_pass ? kExitOk : kExitVerifyFailure;
}

struct SweepRow {
    double value = 0.0;
    int exit_code = 0;
    double lambda = 0.0;
    double final_y_inf = 0.0;
    double fitted_rate = 0.0;
    double r_squared = 0.0;
};

SweepRow sweep_one(Scenario scenario, const std::string& parameter, double value,
                   const std::string& out_dir) {
    if (parameter == "kappa") scenario.kappa = value;
    else if (parameter == "particles") scenario.particles = static_cast<int>(value);
    else if (parameter == "radius") scenario.init_radius = value;
    else if (parameter == "h_norm") scenario.ham_norm = value;
    else throw ConfigError("sweep: parameter must be kappa, particles, radius, or h_norm");

    SweepRow row;
    row.value = value;
    RunResult result = run_scenario(scenario, out_dir);
    row.exit_code = result.exit_code;
    row.lambda = result.spec.metric.lambda;
    row.final_y_inf = std::numeric_limits<double>::quiet_NaN();
    for (auto it = result.trajectory.diagnostics.rbegin();
         it != result.trajectory.diagnostics.rend(); ++it) {
        if (std::isfinite(it->y_inf)) {
            row.final_y_inf = it->y_inf;
            break;
        }
    }
    try {
        double t_end = result.trajectory.states.back().t;
        FitResult fit = fit_decay_rate(diameter_series(result.trajectory), 0.2 * t_end, t_end);
        row.fitted_rate = fit.rate;
        row.r_squared = fit.r_squared;
    } catch (const Error&) {
        row.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        row.r_squared = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

int cmd_sweep(const std::string& scenario_path, const std::string& parameter,
              const std::vector<double>& values, const std::string& out, int threads) {
    Scenario base = parse_scenario_file(scenario_path);
    const std::string out_dir = default_out_dir(out);

    std::vector<SweepRow> rows(values.size());
    std::vector<std::future<SweepRow>> futures;
    int in_flight = std::max(1, threads);
    std::size_t next = 0;
    while (next < values.size() || !futures.empty()) {
        while (next < values.size() && static_cast<int>(futures.size()) < in_flight) {
            double value = values[next];
            std::string sub = out_dir + "/sweep_" + parameter + "_" + std::to_string(value);
            futures.push_back(std::async(std::launch::async, sweep_one, base, parameter, value,
                                         sub));
            ++next;
        }
        std::size_t done = next - futures.size();
        rows[done] = futures.front().get();
        futures.erase(futures.begin());
    }

    std::string aggregate = out_dir + "/sweep_" + parameter + ".csv";
    std::FILE* f = std::fopen(aggregate.c_str(), "w");
    if (f == nullptr) throw ConfigError("cannot open '" + aggregate + "'");
    std::fprintf(f, "%s,exit_code,lambda,final_y_inf,fitted_rate,r_squared\n",
                 parameter.c_str());
    for (const auto& row : rows)
        std::fprintf(f, "%.17g,%d,%.17g,%.17g,%.17g,%.17g\n", row.value, row.exit_code,
                     row.lambda, row.final_y_inf, row.fitted_rate, row.r_squared);
    std::fclose(f);
    std::printf("wrote %s\n", aggregate.c_str());
    return kExitOk;
}

int cmd_pls(const std::string& scenario_path, const std::string& out_file) {
    Scenario scenario = parse_scenario_file(scenario_path);
    ModelSpec spec = build_model(scenario);
    PhaseLockedState state = solve_pls(spec);
    std::printf("residual = %.3e\nlambda coords =", state.residual);
    for (int k = 0; k < state.lambda.coords.size(); ++k)
        std::printf(" %.12g", state.lambda.coords(k));
    std::printf("\n");
    for (std::size_t i = 0; i < state.elements.size(); ++i) {
        std::printf("x%zu:\n", i + 1);
        const Mat& m = state.elements[i].m;
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c)
                std::printf("  %+.12f%+.12fi", m(r, c).real(), m(r, c).imag());
            std::printf("\n");
        }
    }
    if (!out_file.empty()) write_pls(state, spec, out_file);
    return kExitOk;
}

int cmd_check_phi(const std::string& phi_id, const std::string& group_id, int dim) {
    GroupCatalogEntry entry = make_group(group_id, dim);
    const InteractionFunction& phi = phi_by_id(phi_id);
    HypothesisReport report = check_hypothesis_H(phi, entry);
    std::printf("phi = %s on %s(%d)\n", phi_id.c_str(), group_id.c_str(), dim);
    std::printf("phi(e) norm = %.3e\n", report.phi_at_identity);
    std::printf("spectrum of d(phi)_e:");
    for (const auto& z : report.spectrum) std::printf(" %.6g%+.6gi", z.real(), z.imag());
    std::printf("\n");
    if (report.pass) {
        AdaptedMetric metric = build_adapted_metric(report.jacobian);
        std::printf("hypothesis (H): PASS, adapted-metric lambda = %.6g%s\n", metric.lambda,
                    metric.conditioning_warning ? " (conditioning warning)" : "");
        return kExitOk;
    }
    std::printf("hypothesis (H): FAIL (%s)\n", report.detail.c_str());
    return kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synchronization laboratory for Kuramoto-type models on matrix Lie groups"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, scenario_dir, format, parameter, pls_out;
    std::vector<std::string> suite_list;
    std::vector<double> sweep_values;
    std::int64_t seed_override = -1;
    int threads = 1;
    std::string phi_id, group_id;
    int dim = 1;

    auto* run = app.add_subcommand("run", "Integrate a scenario file and write its artifacts");
    run->add_option("--scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory (default $LIESYNC_OUT or ./out)");
    run->add_option("--seed-override", seed_override, "replace the scenario seeds");
    run->add_option("--format", format, "csv or binary trajectory output");

    auto* verify = app.add_subcommand("verify", "Run bundled verification suites");
    verify->add_option("suites", suite_list, "suite names, or 'all'")->required();
    verify->add_option("--out", out_dir, "output directory");
    verify->add_option("--scenario-dir", scenario_dir, "override the bundled scenario directory");

    auto* sweep = app.add_subcommand("sweep", "Run a scenario across parameter values");
    sweep->add_option("--scenario", scenario_path, "scenario file")->required();
    sweep->add_option("--parameter", parameter, "kappa | particles | radius | h_norm")
        ->required();
    sweep->add_option("--values", sweep_values, "parameter values")->required()->delimiter(',');
    sweep->add_option("--threads", threads, "parallel scenario instances");
    sweep->add_option("--out", out_dir, "output directory");

    auto* pls = app.add_subcommand("pls", "Solve and print the phase-locked state");
    pls->add_option("--scenario", scenario_path, "scenario file defining the model")->required();
    pls->add_option("--out", pls_out, "also write the state to this file");

    auto* check = app.add_subcommand("check-phi", "Hypothesis (H) report for an interaction");
    check->add_option("phi", phi_id, "interaction id")->required();
    check->add_option("--group", group_id, "group id")->required();
    check->add_option("--dim", dim, "matrix size")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::optional<std::uint64_t> seed;
            if (seed_override >= 0) seed = static_cast<std::uint64_t>(seed_override);
            return cmd_run(scenario_path, out_dir, seed, format);
        }
        if (verify->parsed()) return cmd_verify(suite_list, out_dir, scenario_dir);
        if (sweep->parsed())
            return cmd_sweep(scenario_path, parameter, sweep_values, out_dir, threads);
        if (pls->parsed()) return cmd_pls(scenario_path, pls_out);
        if (check->parsed()) return cmd_check_phi(phi_id, group_id, dim);
    } catch (const SolverFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolverFailure;
    } catch (const ChartViolation& e) {
        std::fprintf(stderr, "chart violation: %s\n", e.what());
        return kExitChartViolation;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
