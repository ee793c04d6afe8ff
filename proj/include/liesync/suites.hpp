#pragma once

#include "liesync/scenario.hpp"

namespace liesync {

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> results;

    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

/// Names of the bundled verification suites, in the order they are meant to
/// run: kuramoto_id, kuramoto_two, unitary_id, matrix_id, blowup,
/// orbital_rate, locked_state, asymptotic_lock, properties.
const std::vector<std::string>& suite_names();

/// Runs one named suite. Scenario-backed suites read their pinned files from
/// scenario_dir (empty: the directory compiled in at build time). Artifacts
/// land in out_dir when nonempty.
SuiteReport run_suite(const std::string& name, const std::string& out_dir,
                      const std::string& scenario_dir = "");

}  // namespace liesync
