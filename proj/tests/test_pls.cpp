#include <doctest.h>

#include "liesync/errors.hpp"
#include "liesync/lie_ops.hpp"
#include "liesync/pls.hpp"

using namespace liesync;

namespace {

ModelSpec circle_model(const std::vector<double>& frequencies, double kappa) {
    GroupCatalogEntry entry = make_group(GroupFamily::Circle, 1);
    std::vector<AlgebraElement> hams;
    for (double nu : frequencies) {
        Eigen::VectorXd c(1);
        c(0) = nu;
        hams.push_back(AlgebraElement{entry.desc, c});
    }
    return make_model(entry, static_cast<int>(frequencies.size()), kappa, std::move(hams),
                      phi_by_id("kuramoto_sin"));
}

ModelSpec u2_model(int n, double kappa, double h_norm, std::uint64_t h_seed) {
    GroupCatalogEntry entry = make_group(GroupFamily::Unitary, 2);
    const InteractionFunction& phi = phi_by_id("lohe_unitary");
    AdaptedMetric metric = build_adapted_metric(jacobian_at_identity(phi, entry));
    std::vector<AlgebraElement> hams;
    for (int i = 0; i < n; ++i) hams.push_back(random_algebra_element(entry, 1.0, h_seed + i));
    double sup = 0.0;
    for (const auto& h : hams) sup = std::max(sup, metric.norm(h));
    for (auto& h : hams) h = h * (h_norm / sup);
    return make_model(entry, n, kappa, std::move(hams), phi);
}

double locked_diameter(const ModelSpec& spec, const PhaseLockedState& state) {
    double d = 0.0;
    for (std::size_t i = 0; i < state.elements.size(); ++i)
        for (std::size_t j = i + 1; j < state.elements.size(); ++j)
            d = std::max(d, right_invariant_distance(state.elements[i], state.elements[j],
                                                     spec.metric.P));
    return d;
}

}  // namespace

TEST_CASE("solve_pls: identical Hamiltonians lock at the identity") {
    GroupCatalogEntry su2 = make_group(GroupFamily::SpecialUnitary, 2);
    const InteractionFunction& phi = phi_by_id("sl_traceless");
    AlgebraElement h = random_algebra_element(su2, 0.2, 3);
    ModelSpec spec = make_model(su2, 4, 2.0, {h, h, h, h}, phi);
    PhaseLockedState locked = solve_pls(spec);
    CHECK(locked.residual <= 1e-11);
    for (const auto& x : locked.elements)
        CHECK((x.m - Mat::Identity(2, 2)).norm() <= 1e-8);
    CHECK((locked.lambda - h).norm() <= 1e-9);
}

TEST_CASE("solve_pls: Kuramoto pair locks at arcsin(2v/kappa)") {
    // frequencies +-0.25 at kappa = 1: the locked difference satisfies
    // sin(Delta) = 0.5, i.e. Delta = pi/6, and Lambda = 0 after centering
    ModelSpec spec = circle_model({0.25, -0.25}, 1.0);
    PhaseLockedState locked = solve_pls(spec);
    CHECK(locked.residual <= 1e-11);
    double delta = std::arg(locked.elements[0].m(0, 0) / locked.elements[1].m(0, 0));
    CHECK(delta == doctest::Approx(M_PI / 6.0).epsilon(1e-9));
    CHECK(std::abs(locked.lambda.coords(0)) <= 1e-10);
    // gauge: first element pinned to the identity
    CHECK((locked.elements[0].m - Mat::Identity(1, 1)).norm() == 0.0);
}

TEST_CASE("solve_pls: U(2) at large coupling") {
    ModelSpec spec = u2_model(4, 5.0, 0.1, 17);
    PhaseLockedState locked = solve_pls(spec);
    CHECK(locked.residual <= 1e-11);

    SUBCASE("locked diameter shrinks proportionally with ||H||") {
        double d_full = locked_diameter(spec, locked);
        ModelSpec half = u2_model(4, 5.0, 0.05, 17);
        PhaseLockedState locked_half = solve_pls(half);
        double d_half = locked_diameter(half, locked_half);
        CHECK(d_half == doctest::Approx(d_full / 2.0).epsilon(0.05));
    }

    SUBCASE("locked state integrates as a relative equilibrium") {
        EnsembleState initial;
        initial.t = 0.0;
        initial.elements = locked.elements;
        IntegratorConfig config;
        config.dt = 2e-4;
        config.t_final = 10.0 / (spec.kappa * spec.metric.lambda);
        config.record_stride = 100;
        Trajectory traj = integrate(spec, initial, config);
        REQUIRE_FALSE(traj.event.has_value());
        for (const auto& state : traj.states)
            CHECK(lock_residual(spec, state) <= 1e-10);  // 10x solver tolerance
        // the flow itself is X_i exp(Lambda t)
        const auto& last = traj.states.back();
        GroupElement drift = group_exp(locked.lambda * last.t);
        for (int i = 0; i < 4; ++i) {
            Mat expect = group_mul(locked.elements[i], drift).m;
            CHECK((last.elements[i].m - expect).norm() <= 1e-9);
        }
    }
}

TEST_CASE("solve_pls failure reporting") {
    // far below the locking threshold the Newton iteration cannot converge
    ModelSpec spec = circle_model({1.0, -1.0}, 0.5);  // needs kappa > 2 to lock
    try {
        solve_pls(spec);
        FAIL("expected SolverFailure");
    } catch (const SolverFailure& e) {
        CHECK(e.best_residual > 1e-8);
    }
}

TEST_CASE("gauge_align") {
    ModelSpec spec = u2_model(3, 4.0, 0.1, 23);
    PhaseLockedState a = solve_pls(spec);

    SUBCASE("aligned with itself") {
        GaugeAlignment align = gauge_align(spec, a, a);
        CHECK((align.g.m - Mat::Identity(2, 2)).norm() <= 1e-14);
        CHECK(align.mismatch <= 1e-12);
        CHECK(align.lambda_mismatch <= 1e-12);
    }

    SUBCASE("recovers a constructed right translation") {
        GroupElement g0 = random_near_identity(spec.entry, 0.4, 999);
        PhaseLockedState b = a;
        for (auto& x : b.elements) x = group_mul(x, g0);
        b.lambda = adjoint_inverse(g0, a.lambda);
        GaugeAlignment align = gauge_align(spec, a, b);
        CHECK((align.g.m - g0.m).norm() <= 1e-12);
        CHECK(align.mismatch <= 1e-10);
        CHECK(align.lambda_mismatch <= 1e-10);
    }

    SUBCASE("two solves from different guesses agree up to gauge") {
        EnsembleState guess;
        guess.t = 0.0;
        for (int i = 0; i < 3; ++i)
            guess.elements.push_back(
                group_exp(random_algebra_element(spec.entry, 0.05, 3100 + i)));
        PhaseLockedState b = solve_pls(spec, guess);
        GaugeAlignment align = gauge_align(spec, a, b);
        CHECK(align.mismatch <= 1e-8);
        CHECK(align.lambda_mismatch <= 1e-8);
    }
}

TEST_CASE("right-multiplication covariance of the solver") {
    // translating the guess by g returns the same state modulo gauge
    ModelSpec spec = u2_model(3, 4.0, 0.1, 29);
    PhaseLockedState base = solve_pls(spec);
    GroupElement g = random_near_identity(spec.entry, 0.3, 555);
    EnsembleState guess;
    guess.t = 0.0;
    for (const auto& x : base.elements) guess.elements.push_back(group_mul(x, g));
    PhaseLockedState translated = solve_pls(spec, guess);
    GaugeAlignment align = gauge_align(spec, base, translated);
    CHECK(align.mismatch <= 1e-9);
}

TEST_CASE("lambda_from_locked_ratios") {
    SUBCASE("identical ensemble at e gives Lambda = H") {
        GroupCatalogEntry su2 = make_group(GroupFamily::SpecialUnitary, 2);
        const InteractionFunction& phi = phi_by_id("sl_traceless");
        AlgebraElement h = random_algebra_element(su2, 0.2, 7);
        ModelSpec spec = make_model(su2, 3, 2.0, {h, h, h}, phi);
        std::vector<std::vector<GroupElement>> ratios(
            3, std::vector<GroupElement>(3, group_identity(su2.desc)));
        LambdaEstimate est = lambda_from_locked_ratios(spec, ratios);
        CHECK((est.lambda - h).norm() <= 1e-12);
        CHECK(est.max_deviation <= 1e-12);
    }

    SUBCASE("locked Kuramoto pair gives Lambda = 0") {
        ModelSpec spec = circle_model({0.25, -0.25}, 1.0);
        PhaseLockedState locked = solve_pls(spec);
        EnsembleState state;
        state.t = 0.0;
        state.elements = locked.elements;
        LambdaEstimate est = lambda_from_locked_ratios(spec, ratio_matrix(state));
        CHECK(std::abs(est.lambda.coords(0)) <= 1e-9);
        CHECK(est.max_deviation <= 1e-9);
    }

    SUBCASE("integrated ratios at late time are consistent") {
        ModelSpec spec = u2_model(3, 4.0, 0.1, 37);
        EnsembleState initial;
        initial.t = 0.0;
        for (int i = 0; i < 3; ++i)
            initial.elements.push_back(
                group_exp(random_algebra_element(spec.entry, 0.15, 4200 + i)));
        IntegratorConfig config;
        config.dt = IntegratorConfig::default_dt(spec.kappa);
        config.t_final = 30.0 / (spec.kappa * spec.metric.lambda);
        config.record_stride = 1 << 20;
        Trajectory traj = integrate(spec, initial, config);
        REQUIRE_FALSE(traj.event.has_value());
        LambdaEstimate est = lambda_from_locked_ratios(spec, ratio_matrix(traj.states.back()));
        CHECK(est.max_deviation <= 1e-6);
    }

    SUBCASE("non-locked ratios are rejected") {
        ModelSpec spec = u2_model(3, 4.0, 0.1, 43);
        EnsembleState generic;
        generic.t = 0.0;
        for (int i = 0; i < 3; ++i)
            generic.elements.push_back(
                group_exp(random_algebra_element(spec.entry, 0.4, 5200 + i)));
        CHECK_THROWS_AS(lambda_from_locked_ratios(spec, ratio_matrix(generic), 1e-8),
                        InvalidInput);
    }
}

TEST_CASE("continuation probes the existence threshold") {
    // kappa decreasing toward the critical value: converged solutions have
    // increasing locked diameter; below threshold the entries are empty
    ModelSpec spec = circle_model({0.5, -0.5}, 4.0);  // threshold kappa_c = 1
    std::vector<double> kappas = {4.0, 2.0, 1.2, 0.8, 0.5};
    auto branch = solve_pls_continuation(spec, kappas);
    REQUIRE(branch.size() == 5);
    CHECK(branch[0].second.has_value());
    CHECK(branch[1].second.has_value());
    CHECK(branch[2].second.has_value());
    CHECK_FALSE(branch[4].second.has_value());
    double d1 = locked_diameter(spec, *branch[0].second);
    double d3 = locked_diameter(spec, *branch[2].second);
    CHECK(d3 > d1);
}

TEST_CASE("pls output file") {
    ModelSpec spec = circle_model({0.25, -0.25}, 1.0);
    PhaseLockedState locked = solve_pls(spec);
    std::string path = "/tmp/liesync_pls_test.txt";
    write_pls(locked, spec, path);
    std::FILE* f = std::fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    char buffer[256];
    REQUIRE(std::fgets(buffer, sizeof buffer, f) != nullptr);
    CHECK(std::string(buffer).find("group = circle") == 0);
    std::fclose(f);
}
