#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "liesync/analysis.hpp"
#include "liesync/errors.hpp"
#include "liesync/lie_ops.hpp"
#include "liesync/rng.hpp"

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

EnsembleState circle_state(const ModelSpec& spec, const std::vector<double>& phases) {
    EnsembleState state;
    state.t = 0.0;
    for (double theta : phases) {
        Mat m(1, 1);
        m(0, 0) = std::exp(Cplx(0, theta));
        state.elements.emplace_back(spec.desc(), m);
    }
    return state;
}

std::vector<double> angles_of(const EnsembleState& state) {
    std::vector<double> out;
    for (const auto& x : state.elements) out.push_back(std::arg(x.m(0, 0)));
    return out;
}

ModelSpec su2_model(int n, double kappa, double h_norm, std::uint64_t h_seed) {
    GroupCatalogEntry entry = make_group(GroupFamily::SpecialUnitary, 2);
    const InteractionFunction& phi = phi_by_id("sl_traceless");
    AdaptedMetric metric = build_adapted_metric(jacobian_at_identity(phi, entry));
    std::vector<AlgebraElement> hams;
    for (int i = 0; i < n; ++i)
        hams.push_back(random_algebra_element(entry, 1.0, h_seed + i));
    double sup = 0.0;
    for (const auto& h : hams) sup = std::max(sup, metric.norm(h));
    for (auto& h : hams)
        h = h * (sup > 0.0 && h_norm > 0.0 ? h_norm / sup : 0.0);
    return make_model(entry, n, kappa, std::move(hams), phi);
}

EnsembleState random_state(const ModelSpec& spec, double radius, std::uint64_t seed) {
    EnsembleState state;
    state.t = 0.0;
    for (int i = 0; i < spec.n_particles; ++i)
        state.elements.push_back(group_exp(random_algebra_element(spec.entry, radius, seed + i)));
    return state;
}

}  // namespace

TEST_CASE("rhs_group") {
    SUBCASE("identical positions: interaction vanishes, xi = H") {
        ModelSpec spec = su2_model(3, 2.0, 0.1, 11);
        EnsembleState state;
        state.t = 0.0;
        GroupElement x = random_near_identity(spec.entry, 0.3, 99);
        state.elements.assign(3, x);
        auto xi = rhs_group(spec, state);
        for (int i = 0; i < 3; ++i)
            CHECK((xi[i] - spec.hamiltonians[i]).norm() <= 1e-13);
    }

    SUBCASE("Kuramoto pair: xi = (sin(1)/2, -sin(1)/2)") {
        ModelSpec spec = circle_model({0.0, 0.0}, 1.0);
        EnsembleState state = circle_state(spec, {0.0, 1.0});
        auto xi = rhs_group(spec, state);
        CHECK(xi[0].coords(0) == doctest::Approx(std::sin(1.0) / 2.0).epsilon(1e-14));
        CHECK(xi[1].coords(0) == doctest::Approx(-std::sin(1.0) / 2.0).epsilon(1e-14));
    }

    SUBCASE("U(1) reduction equals the scalar Kuramoto RHS") {
        std::vector<double> nu = {0.4, -0.2, 0.1, -0.3};
        ModelSpec spec = circle_model(nu, 1.3);
        CounterRng rng(5150);
        std::vector<double> theta;
        for (int i = 0; i < 4; ++i) theta.push_back(2.0 * (rng.uniform() - 0.5));
        EnsembleState state = circle_state(spec, theta);
        auto xi = rhs_group(spec, state);
        for (int i = 0; i < 4; ++i) {
            double scalar = nu[i];
            for (int j = 0; j < 4; ++j) scalar += 1.3 / 4.0 * std::sin(theta[j] - theta[i]);
            CHECK(xi[i].coords(0) == doctest::Approx(scalar).epsilon(1e-12));
        }
    }
}

TEST_CASE("rhs_log") {
    SUBCASE("zero logs with identical Hamiltonians: locked at the identity") {
        ModelSpec spec = su2_model(4, 1.0, 0.0, 21);
        AlgebraElement h = random_algebra_element(spec.entry, 0.3, 77);
        for (auto& hi : spec.hamiltonians) hi = h;
        LogState logs = LogState::zero(spec.desc(), 4);
        for (const auto& dy : rhs_log(spec, logs)) CHECK(dy.norm() <= 1e-13);
    }

    SUBCASE("abelian case matches the Kuramoto difference equation") {
        std::vector<double> nu = {0.3, -0.1, 0.25};
        ModelSpec spec = circle_model(nu, 0.8);
        std::vector<double> theta = {0.2, -0.4, 0.15};
        EnsembleState state = circle_state(spec, theta);
        LogState logs = log_state_of(state);
        auto dy = rhs_log(spec, logs);
        int p = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j, ++p) {
                double scalar = nu[i] - nu[j];
                for (int k = 0; k < 3; ++k)
                    scalar += 0.8 / 3.0 *
                              (std::sin(theta[k] - theta[i]) - std::sin(theta[k] - theta[j]));
                CHECK(dy[p].coords(0) == doctest::Approx(scalar).epsilon(1e-12));
            }
    }

    SUBCASE("consistency with the group formulation by finite differences") {
        ModelSpec spec = su2_model(2, 1.5, 0.2, 31);
        EnsembleState state = random_state(spec, 0.3, 400);
        IntegratorConfig config;
        config.dt = 1e-4;
        config.t_final = 2e-4;
        config.record_stride = 1;
        Trajectory traj = integrate(spec, state, config);
        REQUIRE(traj.states.size() == 3);
        AlgebraElement y_prev = log_state_of(traj.states[0]).y(0, 1);
        AlgebraElement y_mid = log_state_of(traj.states[1]).y(0, 1);
        AlgebraElement y_next = log_state_of(traj.states[2]).y(0, 1);
        AlgebraElement fd = (y_next - y_prev) * (1.0 / (2.0 * config.dt));
        auto dy = rhs_log(spec, log_state_of(traj.states[1]));
        CHECK((fd - dy[0]).norm() <= 10.0 * config.dt * config.dt + 1e-10);
    }

    SUBCASE("chart violation names the pair") {
        ModelSpec spec = su2_model(2, 1.0, 0.0, 41);
        LogState logs = LogState::zero(spec.desc(), 2);
        Eigen::VectorXd big = Eigen::VectorXd::Zero(3);
        big(0) = 5.0;
        logs.set(0, 1, AlgebraElement{spec.desc(), big});
        CHECK_THROWS_WITH_AS(rhs_log(spec, logs) /* Y_12 out of chart */,
                             doctest::Contains("Y_0,1"), ChartViolation);
    }
}

TEST_CASE("rhs_ratio") {
    SUBCASE("identical ensemble: zero velocity") {
        ModelSpec spec = su2_model(3, 1.0, 0.1, 51);
        for (auto& h : spec.hamiltonians) h = spec.hamiltonians[0];
        EnsembleState state;
        state.t = 0.0;
        state.elements.assign(3, random_near_identity(spec.entry, 0.3, 7));
        auto v = rhs_ratio(spec, ratio_matrix(state));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(v[i][j].norm() <= 1e-13);
    }

    SUBCASE("chain rule: V_ij = xi_i - Ad_{R_ij} xi_j") {
        ModelSpec spec = su2_model(4, 1.7, 0.3, 61);
        EnsembleState state = random_state(spec, 0.4, 800);
        auto ratios = ratio_matrix(state);
        auto v = rhs_ratio(spec, ratios);
        auto xi = rhs_group(spec, state);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (i == j) continue;
                AlgebraElement expect = xi[i] - adjoint(ratios[i][j], xi[j]);
                CHECK((v[i][j] - expect).norm() <= 1e-10);
            }
    }

    SUBCASE("abelian case: velocity differences") {
        ModelSpec spec = circle_model({0.5, -0.5}, 1.0);
        EnsembleState state = circle_state(spec, {0.7, -0.2});
        auto v = rhs_ratio(spec, ratio_matrix(state));
        auto xi = rhs_group(spec, state);
        CHECK(v[0][1].coords(0) ==
              doctest::Approx(xi[0].coords(0) - xi[1].coords(0)).epsilon(1e-13));
    }
}

TEST_CASE("step") {
    SUBCASE("zero RHS leaves the state unchanged") {
        ModelSpec spec = su2_model(2, 1.0, 0.0, 71);
        // kappa cannot be zero by contract, but phi vanishes on an identical
        // ensemble and H = 0, so the flow is stationary
        EnsembleState state;
        state.t = 0.0;
        state.elements.assign(2, random_near_identity(spec.entry, 0.2, 3));
        IntegratorConfig config;
        config.dt = 0.1;
        for (Scheme scheme : {Scheme::LieEuler, Scheme::RKMK4}) {
            config.scheme = scheme;
            EnsembleState next = step(spec, state, config);
            CHECK((next.elements[0].m - state.elements[0].m).norm() <= 1e-15);
            CHECK(next.t == doctest::Approx(0.1));
        }
    }

    SUBCASE("free flow is exact for both schemes") {
        // identical H: interaction off, X_i(t) = exp(tH) X_i(0); the RHS is
        // constant in the right trivialization so even one Lie-Euler step
        // lands exactly
        ModelSpec spec = su2_model(2, 1.0, 0.0, 81);
        AlgebraElement h = random_algebra_element(spec.entry, 0.4, 19);
        for (auto& hi : spec.hamiltonians) hi = h;
        EnsembleState state;
        state.t = 0.0;
        state.elements.assign(2, random_near_identity(spec.entry, 0.2, 5));
        IntegratorConfig config;
        config.dt = 0.25;
        for (Scheme scheme : {Scheme::LieEuler, Scheme::RKMK4}) {
            config.scheme = scheme;
            EnsembleState next = step(spec, state, config);
            Mat expect = group_mul(group_exp(h * 0.25), state.elements[0]).m;
            CHECK((next.elements[0].m - expect).norm() <= 1e-13);
        }
    }

    SUBCASE("LieEuler is first order, RKMK4 fourth") {
        ModelSpec spec = circle_model({0.2, -0.1, -0.1}, 1.0);
        EnsembleState state = circle_state(spec, {0.1, 0.7, -0.4});
        auto endpoint = [&](Scheme scheme, double dt) {
            IntegratorConfig config;
            config.scheme = scheme;
            config.dt = dt;
            config.t_final = 1.0;
            config.record_stride = 1 << 20;
            return integrate(spec, state, config).states.back();
        };
        EnsembleState ref = endpoint(Scheme::RKMK4, 0.05 / 32.0);
        auto err = [&](const EnsembleState& s) {
            double e = 0.0;
            for (int i = 0; i < 3; ++i)
                e = std::max(e, (s.elements[i].m - ref.elements[i].m).norm());
            return e;
        };
        double euler_ratio =
            err(endpoint(Scheme::LieEuler, 0.02)) / err(endpoint(Scheme::LieEuler, 0.01));
        CHECK(euler_ratio == doctest::Approx(2.0).epsilon(0.15));
        double rkmk_ratio =
            err(endpoint(Scheme::RKMK4, 0.05)) / err(endpoint(Scheme::RKMK4, 0.025));
        CHECK(rkmk_ratio == doctest::Approx(16.0).epsilon(0.15));
    }
}

TEST_CASE("integrate") {
    SUBCASE("t_final = 0 yields a single state") {
        ModelSpec spec = circle_model({0.1, -0.1}, 1.0);
        EnsembleState state = circle_state(spec, {0.3, -0.3});
        IntegratorConfig config;
        config.t_final = 0.0;
        Trajectory traj = integrate(spec, state, config);
        CHECK(traj.states.size() == 1);
        CHECK_FALSE(traj.event.has_value());
    }

    SUBCASE("identical-H diameter decays monotonically after the transient") {
        ModelSpec spec = su2_model(5, 1.0, 0.0, 91);
        AlgebraElement h = random_algebra_element(spec.entry, 0.2, 23);
        for (auto& hi : spec.hamiltonians) hi = h;
        EnsembleState state = random_state(spec, 0.3, 900);
        IntegratorConfig config;
        config.dt = 1e-3;
        config.t_final = 5.0;
        config.record_stride = 100;
        Trajectory traj = integrate(spec, state, config);
        REQUIRE_FALSE(traj.event.has_value());
        attach_diagnostics(spec, traj);
        for (std::size_t k = 1; k < traj.diagnostics.size(); ++k)
            CHECK(traj.diagnostics[k].diameter <= traj.diagnostics[k - 1].diameter + 1e-12);
        // exponential envelope with some measured rate
        FitResult fit = fit_decay_rate(diameter_series(traj), 1.0, 5.0);
        CHECK(fit.rate > 0.5);
        CHECK(fit.r_squared > 0.999);
    }

    SUBCASE("divergent matrix ensemble terminates with a blowup event near ln(3)/kappa") {
        // the printed example quotes the ratio ODE in a doubled-coupling
        // convention; under this model's normalization the ODE is
        // u' = (kappa/2)(1 - u^2), so u(0) = -2 escapes at ln(3)/kappa
        GroupCatalogEntry gl2 = make_group(GroupFamily::GeneralLinearComplex, 2);
        ModelSpec spec;
        spec.entry = gl2;
        spec.n_particles = 2;
        spec.kappa = 1.0;
        spec.phi = phi_by_id("lohe_matrix");
        spec.metric = build_adapted_metric(jacobian_at_identity(spec.phi, gl2));
        spec.hamiltonians.assign(2, algebra_zero(gl2.desc));
        EnsembleState state;
        state.t = 0.0;
        Mat x1 = Mat::Identity(2, 2);
        Mat x2(2, 2);
        x2 << -0.5, 0, 0, -2.0;
        state.elements.emplace_back(gl2.desc, x1);
        state.elements.emplace_back(gl2.desc, x2);
        IntegratorConfig config;
        config.dt = 1e-3;
        config.t_final = 3.0;
        config.record_stride = 10;
        Trajectory traj = integrate(spec, state, config);
        REQUIRE(traj.event.has_value());
        CHECK(traj.event->kind == TerminationEvent::Kind::Blowup);
        double t_star = std::log(3.0);
        CHECK(traj.event->t >= t_star - 2.0 * config.dt);
        CHECK(traj.event->t <= t_star + 5.0 * config.dt);
    }

    SUBCASE("compact group and free flow never trigger the detector") {
        ModelSpec spec = su2_model(3, 1.0, 0.3, 101);
        EnsembleState state = random_state(spec, 0.3, 1000);
        IntegratorConfig config;
        config.dt = 1e-2;
        config.t_final = 10.0;
        config.record_stride = 100;
        Trajectory traj = integrate(spec, state, config);
        CHECK_FALSE(traj.event.has_value());

        // noncompact free flow: identical positions keep the interaction off
        // and X(t) = exp(tH) X_0 grows only like e^{|H| t}
        GroupCatalogEntry gl2 = make_group(GroupFamily::GeneralLinearComplex, 2);
        ModelSpec free_spec;
        free_spec.entry = gl2;
        free_spec.n_particles = 2;
        free_spec.kappa = 1.0;
        free_spec.phi = phi_by_id("lohe_matrix");
        free_spec.metric = build_adapted_metric(jacobian_at_identity(free_spec.phi, gl2));
        free_spec.hamiltonians.assign(2, random_algebra_element(gl2, 0.3, 55));
        EnsembleState same;
        same.t = 0.0;
        same.elements.assign(2, random_near_identity(gl2, 0.2, 66));
        Trajectory free_traj = integrate(free_spec, same, config);
        CHECK_FALSE(free_traj.event.has_value());
        Mat expect = group_mul(group_exp(free_spec.hamiltonians[0] * 10.0), same.elements[0]).m;
        CHECK((free_traj.states.back().elements[0].m - expect).norm() <= 1e-8 * expect.norm());
    }
}

TEST_CASE("detect_blowup edge cases") {
    GroupCatalogEntry gl2 = make_group(GroupFamily::GeneralLinearComplex, 2);
    IntegratorConfig config;
    EnsembleState state;
    state.t = 1.0;
    state.elements.emplace_back(gl2.desc, Mat(Mat::Identity(2, 2) * 1e9));
    CHECK(detect_blowup(state, 1e9, config).has_value());  // ceiling

    EnsembleState fine;
    fine.t = 1.0;
    fine.elements.emplace_back(gl2.desc, Mat(Mat::Identity(2, 2) * 2.0));
    CHECK_FALSE(detect_blowup(fine, 1.9, config).has_value());

    EnsembleState growing;
    growing.t = 1.0;
    growing.elements.emplace_back(gl2.desc, Mat(Mat::Identity(2, 2) * 1e3));
    CHECK(detect_blowup(growing, 10.0, config).has_value());  // geometric growth
}

TEST_CASE("Galilean transformation and Kuramoto conservation") {
    std::vector<double> nu = {0.3, -0.1, 0.05, -0.25};
    double mean_nu = 0.0;
    for (double v : nu) mean_nu += v / nu.size();
    std::vector<double> theta0 = {0.2, -0.1, 0.05, -0.15};

    ModelSpec base = circle_model(nu, 1.0);
    EnsembleState initial = circle_state(base, theta0);
    IntegratorConfig config;
    config.dt = 1e-3;
    config.t_final = 8.0;
    config.record_stride = 100;
    Trajectory base_traj = integrate(base, initial, config);

    SUBCASE("right translation plus central shift maps trajectories exactly") {
        std::vector<double> shifted = nu;
        for (double& f : shifted) f += mean_nu;
        ModelSpec primed = circle_model(shifted, 1.0);
        double gamma = 0.7;
        EnsembleState translated = initial;
        for (auto& x : translated.elements) x.m(0, 0) *= std::exp(Cplx(0, gamma));
        Trajectory primed_traj = integrate(primed, translated, config);
        for (std::size_t k = 0; k < base_traj.states.size(); ++k) {
            double t = base_traj.states[k].t;
            for (int i = 0; i < 4; ++i) {
                Cplx expect = base_traj.states[k].elements[i].m(0, 0) *
                              std::exp(Cplx(0, gamma + mean_nu * t));
                CHECK(std::abs(primed_traj.states[k].elements[i].m(0, 0) - expect) <= 1e-10);
            }
        }
    }

    SUBCASE("centered frequencies conserve the total phase") {
        std::vector<double> centered = nu;
        for (double& f : centered) f -= mean_nu;
        ModelSpec zero_sum = circle_model(centered, 1.0);
        Trajectory traj = integrate(zero_sum, initial, config);
        double sum0 = 0.0;
        for (double th : theta0) sum0 += th;
        for (const auto& state : traj.states) {
            double s = 0.0;
            for (double a : angles_of(state)) s += a;
            CHECK(std::abs(s - sum0) <= 1e-10);
        }
    }
}

TEST_CASE("formulation consistency: group flow vs log flow") {
    ModelSpec spec = su2_model(3, 2.0, 0.1, 111);
    EnsembleState initial = random_state(spec, 0.2, 1100);
    IntegratorConfig config;
    config.dt = 1e-3;
    config.t_final = 1.0;
    config.record_stride = 100;

    Trajectory group_traj = integrate(spec, initial, config);
    REQUIRE_FALSE(group_traj.event.has_value());

    LogTrajectory log_traj = integrate_log(spec, log_state_of(initial), config);
    REQUIRE_FALSE(log_traj.event.has_value());
    REQUIRE(log_traj.states.size() == group_traj.states.size());

    for (std::size_t k = 0; k < group_traj.states.size(); ++k) {
        LogState from_group = log_state_of(group_traj.states[k]);
        double diff = lyapunov_diff(from_group, log_traj.states[k], spec.metric);
        CHECK(diff <= 1e-9);  // both integrations carry O(dt^4) error
    }
}

TEST_CASE("compatibility residual stays small along trajectories") {
    ModelSpec spec = su2_model(4, 2.0, 0.15, 121);
    EnsembleState initial = random_state(spec, 0.25, 1200);
    IntegratorConfig config;
    config.dt = 1e-3;
    config.t_final = 2.0;
    config.record_stride = 200;
    Trajectory traj = integrate(spec, initial, config);
    REQUIRE_FALSE(traj.event.has_value());
    attach_diagnostics(spec, traj);
    for (const auto& rec : traj.diagnostics) {
        REQUIRE(std::isfinite(rec.compat_residual));
        CHECK(rec.compat_residual <= 1e-6);
    }
}

TEST_CASE("membership drift over one million RKMK4 steps" * doctest::timeout(300)) {
    // U(2), renormalization off: the unitarity defect must stay below 1e-8
    GroupCatalogEntry u2 = make_group(GroupFamily::Unitary, 2);
    const InteractionFunction& phi = phi_by_id("lohe_unitary");
    ModelSpec spec;
    spec.entry = u2;
    spec.n_particles = 2;
    spec.kappa = 1.0;
    spec.phi = phi;
    spec.metric = build_adapted_metric(jacobian_at_identity(phi, u2));
    spec.hamiltonians = {random_algebra_element(u2, 0.3, 1), random_algebra_element(u2, 0.3, 2)};
    EnsembleState state = random_state(spec, 0.4, 1300);

    IntegratorConfig config;
    config.dt = 1e-3;
    config.t_final = 1000.0;  // 1e6 steps
    config.record_stride = 100000;
    config.drift_tolerance = 1e-8;
    config.chart_policy = ChartPolicy::Abort;  // drift beyond tolerance would abort
    Trajectory traj = integrate(spec, state, config);
    REQUIRE_FALSE(traj.event.has_value());
    double drift = 0.0;
    for (const auto& x : traj.states.back().elements)
        drift = std::max(drift, validate_membership(x));
    CHECK(drift <= 1e-8);
}

TEST_CASE("splitting transform") {
    ModelSpec spec = su2_model(3, 1.0, 0.0, 131);
    AlgebraElement h = random_algebra_element(spec.entry, 0.3, 29);
    for (auto& hi : spec.hamiltonians) hi = h;
    EnsembleState initial = random_state(spec, 0.2, 1400);
    IntegratorConfig config;
    config.dt = 1e-3;
    config.t_final = 1.0;
    config.record_stride = 100;
    Trajectory traj = integrate(spec, initial, config);

    SUBCASE("time-zero slice unchanged, H = 0 transform is the identity") {
        Trajectory same = splitting_transform(algebra_zero(spec.desc()), traj);
        for (std::size_t k = 0; k < traj.states.size(); ++k)
            CHECK((same.states[k].elements[0].m - traj.states[k].elements[0].m).norm() <= 1e-15);
        Trajectory shifted = splitting_transform(h, traj);
        CHECK((shifted.states[0].elements[0].m - traj.states[0].elements[0].m).norm() <= 1e-15);
    }

    SUBCASE("transformed trajectory solves the H = 0 model") {
        Trajectory shifted = splitting_transform(h, traj);
        ModelSpec driftless = spec;
        for (auto& hi : driftless.hamiltonians) hi = algebra_zero(spec.desc());
        // central finite differences of the recorded states against the
        // H = 0 right-trivialized velocity
        double step_t = traj.states[1].t - traj.states[0].t;
        double worst = 0.0;
        for (std::size_t k = 1; k + 1 < shifted.states.size(); ++k) {
            auto xi = rhs_group(driftless, shifted.states[k]);
            for (int i = 0; i < 3; ++i) {
                Mat fd = (shifted.states[k + 1].elements[i].m -
                          shifted.states[k - 1].elements[i].m) /
                         (2.0 * step_t);
                Mat analytic = xi[i].matrix() * shifted.states[k].elements[i].m;
                worst = std::max(worst, (fd - analytic).norm());
            }
        }
        CHECK(worst <= 10.0 * step_t * step_t);
    }
}

TEST_CASE("compensated summation flag") {
    ModelSpec spec = su2_model(6, 2.0, 0.2, 151);
    EnsembleState initial = random_state(spec, 0.3, 1600);
    IntegratorConfig config;
    config.dt = 1e-3;
    config.t_final = 1.0;
    config.record_stride = 1 << 20;
    Trajectory plain = integrate(spec, initial, config);
    config.compensated_sum = true;
    Trajectory kahan = integrate(spec, initial, config);
    for (int i = 0; i < 6; ++i) {
        double diff =
            (plain.states.back().elements[i].m - kahan.states.back().elements[i].m).norm();
        CHECK(diff <= 1e-12);  // same flow, last-ulp summation differences only
    }
}

TEST_CASE("trajectory serialization") {
    ModelSpec spec = su2_model(2, 1.0, 0.1, 141);
    EnsembleState initial = random_state(spec, 0.2, 1500);
    IntegratorConfig config;
    config.dt = 1e-2;
    config.t_final = 0.1;
    config.record_stride = 2;
    Trajectory traj = integrate(spec, initial, config);
    attach_diagnostics(spec, traj);

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "liesync_test_io";
    fs::create_directories(dir);

    SUBCASE("binary snapshot round-trips exactly") {
        std::string path = (dir / "traj.bin").string();
        write_trajectory_binary(traj, path);
        Trajectory back = read_trajectory_binary(path, spec.entry);
        REQUIRE(back.states.size() == traj.states.size());
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            CHECK(back.states[k].t == traj.states[k].t);
            for (int i = 0; i < 2; ++i)
                CHECK((back.states[k].elements[i].m - traj.states[k].elements[i].m).norm() ==
                      0.0);
        }
        GroupCatalogEntry other = make_group(GroupFamily::Unitary, 2);
        CHECK_THROWS_AS(read_trajectory_binary(path, other), ConfigError);

        // exact resume: continuing from the snapshot equals one long run
        IntegratorConfig tail = config;
        tail.t_final = 0.1;
        Trajectory resumed = integrate(spec, back.states.back(), tail);
        IntegratorConfig full = config;
        full.t_final = 0.2;
        Trajectory whole = integrate(spec, initial, full);
        CHECK((resumed.states.back().elements[0].m - whole.states.back().elements[0].m)
                  .norm() == 0.0);
    }

    SUBCASE("CSV output is deterministic") {
        std::string a = (dir / "a.csv").string();
        std::string b = (dir / "b.csv").string();
        write_trajectory_csv(traj, a);
        write_trajectory_csv(traj, b);
        std::ifstream fa(a), fb(b);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        CHECK(sa.str() == sb.str());
        CHECK(sa.str().find("t,x0_00_re,x0_00_im") == 0);
    }
}
