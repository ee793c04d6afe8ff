#include "liesync/pls.hpp"

#include <cstdio>

#include "liesync/errors.hpp"
#include "liesync/lie_ops.hpp"

namespace liesync {

namespace {

std::vector<GroupElement> elements_from_unknowns(const ModelSpec& spec,
                                                 const Eigen::VectorXd& u) {
    const int dim = spec.desc()->dim();
    std::vector<GroupElement> x;
    x.reserve(spec.n_particles);
    x.push_back(group_identity(spec.desc()));
    for (int i = 1; i < spec.n_particles; ++i) {
        Eigen::VectorXd y = u.segment((i - 1) * dim, dim);
        x.push_back(group_exp(AlgebraElement{spec.desc(), y}));
    }
    return x;
}

AlgebraElement lambda_from_unknowns(const ModelSpec& spec, const Eigen::VectorXd& u) {
    const int dim = spec.desc()->dim();
    return {spec.desc(), u.tail(dim)};
}

// stacked residual blocks F_i = Ad_{X_i} Lambda - H_i - (kappa/N) sum phi
Eigen::VectorXd residual_vector(const ModelSpec& spec, const std::vector<GroupElement>& x,
                                const AlgebraElement& lambda) {
    const int n = spec.n_particles;
    const int dim = spec.desc()->dim();
    std::vector<GroupElement> inverses;
    inverses.reserve(n);
    for (const auto& xi : x) inverses.push_back(group_inverse(xi));

    Eigen::VectorXd f(n * dim);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd interaction = Eigen::VectorXd::Zero(dim);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            interaction += eval_phi(spec.phi, group_mul(x[j], inverses[i])).coords;
        }
        Eigen::VectorXd lhs = adjoint(x[i], lambda).coords;
        f.segment(i * dim, dim) =
            lhs - spec.hamiltonians[i].coords - (spec.kappa / n) * interaction;
    }
    return f;
}

double residual_norm(const ModelSpec& spec, const Eigen::VectorXd& f) {
    const int dim = spec.desc()->dim();
    double worst = 0.0;
    for (int i = 0; i < spec.n_particles; ++i)
        worst = std::max(worst, spec.metric.norm(Eigen::VectorXd(f.segment(i * dim, dim))));
    return worst;
}

Eigen::VectorXd unknowns_from_state(const ModelSpec& spec, const EnsembleState& state) {
    const int dim = spec.desc()->dim();
    const int n = spec.n_particles;
    Eigen::VectorXd u(n * dim);
    GroupElement x1_inv = group_inverse(state.elements[0]);
    std::vector<GroupElement> gauge_fixed;
    gauge_fixed.reserve(n);
    for (int i = 0; i < n; ++i) {
        GroupElement xi = group_mul(state.elements[i], x1_inv);
        gauge_fixed.push_back(xi);
        if (i >= 1) u.segment((i - 1) * dim, dim) = group_log(xi).coords;
    }
    // Lambda estimate: mean over particles of Ad_{X_i}^{-1} of the locked RHS
    std::vector<GroupElement> inverses;
    for (const auto& xi : gauge_fixed) inverses.push_back(group_inverse(xi));
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd interaction = Eigen::VectorXd::Zero(dim);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            interaction += eval_phi(spec.phi, group_mul(gauge_fixed[j], inverses[i])).coords;
        }
        AlgebraElement rhs{spec.desc(),
                           spec.hamiltonians[i].coords + (spec.kappa / n) * interaction};
        lam += adjoint_inverse(gauge_fixed[i], rhs).coords;
    }
    u.tail(dim) = lam / n;
    return u;
}

}  // namespace

double pls_residual(const ModelSpec& spec, const std::vector<GroupElement>& elements,
                    const AlgebraElement& lambda) {
    return residual_norm(spec, residual_vector(spec, elements, lambda));
}

PhaseLockedState solve_pls(const ModelSpec& spec,
                           const std::optional<EnsembleState>& initial_guess,
                           const PlsOptions& options) {
    spec.validate();
    const int dim = spec.desc()->dim();
    const int n = spec.n_particles;

    EnsembleState seed_state;
    if (initial_guess.has_value()) {
        seed_state = *initial_guess;
    } else {
        // long-time state of a short integration from the identity ensemble
        double lam = spec.metric.lambda > 0.0 ? spec.metric.lambda : 1.0;
        double horizon =
            options.seed_horizon > 0.0 ? options.seed_horizon : 10.0 / (spec.kappa * lam);
        IntegratorConfig config;
        config.dt = IntegratorConfig::default_dt(spec.kappa);
        config.t_final = horizon;
        config.record_stride = std::max<long>(1, std::lround(horizon / config.dt));
        EnsembleState identity_start;
        identity_start.t = 0.0;
        identity_start.elements.assign(n, group_identity(spec.desc()));
        Trajectory traj = integrate(spec, identity_start, config);
        if (traj.event.has_value())
            throw SolverFailure("solve_pls: seeding integration terminated early (" +
                                    traj.event->detail + ")",
                                std::numeric_limits<double>::infinity());
        seed_state = traj.states.back();
    }

    Eigen::VectorXd u = unknowns_from_state(spec, seed_state);
    auto evaluate = [&](const Eigen::VectorXd& v) {
        return residual_vector(spec, elements_from_unknowns(spec, v),
                               lambda_from_unknowns(spec, v));
    };

    Eigen::VectorXd f = evaluate(u);
    double best = residual_norm(spec, f);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (best <= options.tolerance) break;
        // forward-difference Jacobian
        Eigen::MatrixXd jac(n * dim, n * dim);
        for (int k = 0; k < n * dim; ++k) {
            double h = options.fd_step * (1.0 + std::abs(u(k)));
            Eigen::VectorXd up = u;
            up(k) += h;
            jac.col(k) = (evaluate(up) - f) / h;
        }
        Eigen::VectorXd delta = jac.fullPivLu().solve(-f);
        if (!delta.allFinite())
            throw SolverFailure("solve_pls: singular Jacobian", best);

        double scale = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 8; ++bt) {
            Eigen::VectorXd trial = u + scale * delta;
            Eigen::VectorXd ft;
            try {
                ft = evaluate(trial);
            } catch (const Error&) {
                scale *= 0.5;
                continue;
            }
            double rn = residual_norm(spec, ft);
            if (rn < best) {
                u = trial;
                f = ft;
                best = rn;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;
    }

    if (best > options.tolerance)
        throw SolverFailure("solve_pls: no convergence, best residual " + std::to_string(best),
                            best);

    PhaseLockedState state;
    state.elements = elements_from_unknowns(spec, u);
    state.lambda = lambda_from_unknowns(spec, u);
    state.residual = best;
    return state;
}

GaugeAlignment gauge_align(const ModelSpec& spec, const PhaseLockedState& a,
                           const PhaseLockedState& b) {
    if (a.elements.size() != b.elements.size())
        throw InvalidInput("gauge_align: particle counts differ");
    GaugeAlignment out;
    out.g = group_mul(group_inverse(a.elements[0]), b.elements[0]);
    double mismatch = 0.0;
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
        mismatch = std::max(mismatch,
                            right_invariant_distance(group_mul(a.elements[i], out.g),
                                                     b.elements[i], spec.metric.P));
    }
    out.mismatch = mismatch;
    AlgebraElement mapped = adjoint_inverse(out.g, a.lambda);
    out.lambda_mismatch = spec.metric.norm(mapped - b.lambda);
    return out;
}

LambdaEstimate lambda_from_locked_ratios(const ModelSpec& spec,
                                         const std::vector<std::vector<GroupElement>>& ratios,
                                         double tolerance) {
    const int n = spec.n_particles;
    const int dim = spec.desc()->dim();
    // cocycle: R_ii = e, R_ij R_jk = R_ik
    for (int i = 0; i < n; ++i) {
        double e_res = (ratios[i][i].m - Mat::Identity(ratios[i][i].size(), ratios[i][i].size()))
                           .norm();
        if (e_res > tolerance)
            throw InvalidInput("lambda_from_locked_ratios: R_ii != e (residual " +
                               std::to_string(e_res) + ")");
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double res = (ratios[i][j].m * ratios[j][k].m - ratios[i][k].m).norm();
                if (res > tolerance)
                    throw InvalidInput("lambda_from_locked_ratios: cocycle defect " +
                                       std::to_string(res));
            }

    Eigen::MatrixXd values(dim, n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd interaction = Eigen::VectorXd::Zero(dim);
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            interaction += eval_phi(spec.phi, ratios[k][i]).coords;
        }
        AlgebraElement rhs{spec.desc(),
                           spec.hamiltonians[i].coords + (spec.kappa / n) * interaction};
        values.col(i) = adjoint_inverse(ratios[i][0], rhs).coords;
    }
    Eigen::VectorXd mean = values.rowwise().mean();
    double deviation = 0.0;
    for (int i = 0; i < n; ++i)
        deviation =
            std::max(deviation, spec.metric.norm(Eigen::VectorXd(values.col(i) - mean)));
    if (deviation > tolerance)
        throw InvalidInput("lambda_from_locked_ratios: per-particle values disagree by " +
                           std::to_string(deviation) + " (ratios not locked)");
    LambdaEstimate est{AlgebraElement{spec.desc(), mean}, deviation};
    return est;
}

std::vector<std::pair<double, std::optional<PhaseLockedState>>> solve_pls_continuation(
    const ModelSpec& spec, const std::vector<double>& kappas, const PlsOptions& options) {
    std::vector<std::pair<double, std::optional<PhaseLockedState>>> out;
    std::optional<EnsembleState> guess;
    for (double kappa : kappas) {
        ModelSpec at_kappa = spec;
        at_kappa.kappa = kappa;
        try {
            PhaseLockedState s = solve_pls(at_kappa, guess, options);
            EnsembleState g;
            g.t = 0.0;
            g.elements = s.elements;
            guess = g;
            out.emplace_back(kappa, std::move(s));
        } catch (const Error&) {
            out.emplace_back(kappa, std::nullopt);
        }
    }
    return out;
}

void write_pls(const PhaseLockedState& state, const ModelSpec& spec, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw ConfigError("cannot open '" + path + "'");
    std::fprintf(f, "group = %s\n", family_id(spec.desc()->family).c_str());
    std::fprintf(f, "dim = %d\n", spec.desc()->matrix_size);
    std::fprintf(f, "particles = %d\n", spec.n_particles);
    std::fprintf(f, "kappa = %.17g\n", spec.kappa);
    std::fprintf(f, "residual = %.17g\n", state.residual);
    std::fprintf(f, "gauge = %s\n", state.gauge.c_str());
    std::fprintf(f, "lambda_coords =");
    for (int k = 0; k < state.lambda.coords.size(); ++k)
        std::fprintf(f, " %.17g", state.lambda.coords(k));
    std::fprintf(f, "\n");
    for (std::size_t i = 0; i < state.elements.size(); ++i) {
        std::fprintf(f, "x%zu =", i + 1);
        const Mat& m = state.elements[i].m;
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                std::fprintf(f, " %.17g %.17g", m(r, c).real(), m(r, c).imag());
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace liesync
