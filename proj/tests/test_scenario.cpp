#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "liesync/errors.hpp"
#include "liesync/scenario.hpp"

using namespace liesync;

namespace {

const char* kMinimal = R"(
[model]
group = circle
dim = 1
particles = 2
kappa = 1.0
phi = kuramoto_sin

[hamiltonians]
mode = frequencies
nu = 0.25, -0.25

[initial]
mode = phases
phases = 0.3, -0.3

[integrator]
scheme = rkmk4
dt = 0.01
t_final = 0.5
record_stride = 5
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing") {
    SUBCASE("minimal scenario parses") {
        Scenario sc = parse_scenario_text(kMinimal, "minimal");
        CHECK(sc.group_id == "circle");
        CHECK(sc.particles == 2);
        CHECK(sc.kappa == 1.0);
        CHECK(sc.config.dt == 0.01);
        CHECK(sc.frequencies.size() == 2);
        CHECK(sc.phases.size() == 2);
    }

    SUBCASE("unknown keys are rejected with a location") {
        std::string bad = std::string(kMinimal) + "\n[model]\nbogus = 1\n";
        try {
            parse_scenario_text(bad, "bad.scn");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("bad.scn:") != std::string::npos);
            CHECK(std::string(e.what()).find("bogus") != std::string::npos);
        }
    }

    SUBCASE("random sections demand seeds") {
        const char* text = R"(
[model]
group = su
dim = 2
particles = 3
kappa = 1.0
phi = sl_traceless

[hamiltonians]
mode = random
norm = 0.1
)";
        CHECK_THROWS_AS(parse_scenario_text(text, "noseed"), ConfigError);
    }

    SUBCASE("unresolvable references are rejected") {
        std::string wrong_phi(kMinimal);
        wrong_phi.replace(wrong_phi.find("kuramoto_sin"), 12, "not_a_phi___");
        CHECK_THROWS_AS(parse_scenario_text(wrong_phi, "x"), ConfigError);
    }

    SUBCASE("matrix literals parse complex entries") {
        const char* text = R"(
[model]
group = gl_c
dim = 2
particles = 2
kappa = 1.0
phi = lohe_matrix

[initial]
mode = explicit
x1 = 1, 0; 0, 1
x2 = -0.5+0i, 0; 0, -2
)";
        Scenario sc = parse_scenario_text(text, "explicit");
        REQUIRE(sc.init_explicit.size() == 2);
        CHECK(sc.init_explicit[1](0, 0) == Cplx(-0.5, 0.0));
        CHECK(sc.init_explicit[1](1, 1) == Cplx(-2.0, 0.0));
    }
}

TEST_CASE("scenario runs") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "liesync_scenario_test";
    fs::remove_all(dir);

    SUBCASE("t_final = 0 produces a single-row trajectory and exit 0") {
        std::string text(kMinimal);
        text.replace(text.find("t_final = 0.5"), 13, "t_final = 0.0");
        text += "\n[output]\ntrajectory = t.csv\ndiagnostics = d.csv\nsummary = s.txt\n";
        Scenario sc = parse_scenario_text(text, "zero");
        RunResult run = run_scenario(sc, dir.string());
        CHECK(run.exit_code == kExitOk);
        CHECK(run.trajectory.states.size() == 1);
        std::string csv = slurp((dir / "t.csv").string());
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
    }

    SUBCASE("identical scenario and seeds produce byte-identical CSV output") {
        const char* text = R"(
[model]
group = su
dim = 2
particles = 3
kappa = 2.0
phi = sl_traceless

[hamiltonians]
mode = random
seed = 5
norm = 0.1

[initial]
mode = random
seed = 11
radius = 0.2

[integrator]
dt = 0.001
t_final = 0.2
record_stride = 10

[output]
trajectory = traj.csv
diagnostics = diag.csv
)";
        Scenario sc = parse_scenario_text(text, "det");
        run_scenario(sc, (dir / "a").string());
        run_scenario(sc, (dir / "b").string());
        CHECK(slurp((dir / "a" / "traj.csv").string()) ==
              slurp((dir / "b" / "traj.csv").string()));
        CHECK(slurp((dir / "a" / "diag.csv").string()) ==
              slurp((dir / "b" / "diag.csv").string()));
        CHECK_FALSE(slurp((dir / "a" / "traj.csv").string()).empty());

        // a seed override changes the data
        RunResult other = run_scenario(sc, (dir / "c").string(), 999);
        CHECK(slurp((dir / "a" / "traj.csv").string()) !=
              slurp((dir / "c" / "traj.csv").string()));
    }

    SUBCASE("verify failure maps to the verify exit code") {
        std::string text(kMinimal);
        text += R"(
[verify impossible]
check = ku_id_bound
d0 = 0.6
tol = 1e-9
)";
        // the pair starts at diameter 0.6 but has nonidentical frequencies,
        // so the identical-oscillator envelope fails
        Scenario sc = parse_scenario_text(text, "fail");
        RunResult run = run_scenario(sc, dir.string());
        CHECK(run.exit_code == kExitVerifyFailure);
        REQUIRE(run.checks.size() == 1);
        CHECK_FALSE(run.checks[0].pass);
    }

    SUBCASE("frequencies mode rejects non-circle groups at build") {
        const char* text = R"(
[model]
group = su
dim = 2
particles = 2
kappa = 1.0
phi = sl_traceless

[hamiltonians]
mode = frequencies
nu = 0.1, -0.1
)";
        Scenario sc = parse_scenario_text(text, "wrong");
        CHECK_THROWS_AS(build_model(sc), ConfigError);
    }
}

TEST_CASE("initial-data rescaling hits the requested measures") {
    const char* text = R"(
[model]
group = u
dim = 2
particles = 4
kappa = 1.0
phi = lohe_unitary

[initial]
mode = random
seed = 31
radius = 1.0
rescale_frobenius_diameter = 1.2
)";
    Scenario sc = parse_scenario_text(text, "rescale");
    ModelSpec spec = build_model(sc);
    EnsembleState state = build_initial(sc, spec);
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            d = std::max(d, (state.elements[i].m - state.elements[j].m).norm());
    CHECK(d == doctest::Approx(1.2).epsilon(1e-9));
}
