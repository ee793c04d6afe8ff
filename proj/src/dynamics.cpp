#include "liesync/dynamics.hpp"

#include <cstdio>
#include <cstring>
#include <cmath>
#include <limits>
#include <memory>
#include <fstream>

#include "liesync/errors.hpp"
#include "liesync/lie_ops.hpp"

namespace liesync {

double ModelSpec::hamiltonian_sup_norm() const {
    double m = 0.0;
    for (const auto& h : hamiltonians) m = std::max(m, metric.norm(h));
    return m;
}

void ModelSpec::validate() const {
    if (n_particles < 2) throw ConfigError("model: N must be >= 2");
    if (!(kappa > 0.0)) throw ConfigError("model: kappa must be positive");
    if (static_cast<int>(hamiltonians.size()) != n_particles)
        throw ConfigError("model: need one Hamiltonian per particle");
    for (const auto& h : hamiltonians)
        if (h.desc.get() != entry.desc.get())
            throw ConfigError("model: Hamiltonian from a different group");
    if (!phi.compatible_with(entry.desc->family))
        throw ConfigError("model: interaction '" + phi.id + "' incompatible with group '" +
                          family_id(entry.desc->family) + "'");
}

ModelSpec make_model(GroupCatalogEntry entry, int n_particles, double kappa,
                     std::vector<AlgebraElement> hamiltonians, const InteractionFunction& phi) {
    ModelSpec spec;
    spec.entry = std::move(entry);
    spec.n_particles = n_particles;
    spec.kappa = kappa;
    spec.hamiltonians = std::move(hamiltonians);
    spec.phi = phi;
    spec.metric = build_adapted_metric(jacobian_at_identity(phi, spec.entry));
    spec.validate();
    return spec;
}

LogState LogState::zero(const DescriptorPtr& desc, int n) {
    LogState s;
    s.n = n;
    s.desc = desc;
    s.upper.assign(static_cast<std::size_t>(n) * (n - 1) / 2, algebra_zero(desc));
    return s;
}

int LogState::index(int i, int j) const {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

AlgebraElement LogState::y(int i, int j) const {
    if (i == j) return algebra_zero(desc);
    if (i < j) return upper[index(i, j)];
    return -upper[index(j, i)];
}

void LogState::set(int i, int j, const AlgebraElement& v) { upper[index(i, j)] = v; }

namespace {

// sum_j phi(X_j X_i^{-1}) in ascending j, optionally Kahan-compensated
struct CoordAccumulator {
    explicit CoordAccumulator(int dim, bool compensated)
        : sum(Eigen::VectorXd::Zero(dim)), comp(Eigen::VectorXd::Zero(dim)),
          compensated(compensated) {}

    void add(const Eigen::VectorXd& v) {
        if (!compensated) {
            sum += v;
            return;
        }
        for (int k = 0; k < sum.size(); ++k) {
            double y = v(k) - comp(k);
            double t = sum(k) + y;
            comp(k) = (t - sum(k)) - y;
            sum(k) = t;
        }
    }

    Eigen::VectorXd sum, comp;
    bool compensated;
};

std::vector<AlgebraElement> rhs_group_impl(const ModelSpec& spec,
                                           const std::vector<GroupElement>& elements,
                                           bool compensated) {
    const int n = spec.n_particles;
    const auto& desc = spec.desc();
    std::vector<GroupElement> inverses;
    inverses.reserve(n);
    try {
        for (const auto& x : elements) inverses.push_back(group_inverse(x));
    } catch (const Error& e) {
        throw IntegrationError(std::string("rhs evaluation: ") + e.what());
    }

    std::vector<AlgebraElement> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        CoordAccumulator acc(desc->dim(), compensated);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;  // phi(e) = 0
            GroupElement ratio = group_mul(elements[j], inverses[i]);
            try {
                acc.add(eval_phi(spec.phi, ratio).coords);
            } catch (const Error& e) {
                throw IntegrationError("rhs evaluation failed at pair (" + std::to_string(i) +
                                       "," + std::to_string(j) + "): " + e.what());
            }
        }
        Eigen::VectorXd coords =
            spec.hamiltonians[i].coords + (spec.kappa / n) * acc.sum;
        out.emplace_back(desc, std::move(coords));
    }
    return out;
}

}  // namespace

std::vector<AlgebraElement> rhs_group(const ModelSpec& spec, const EnsembleState& state) {
    return rhs_group_impl(spec, state.elements, false);
}

std::vector<AlgebraElement> rhs_log(const ModelSpec& spec, const LogState& state) {
    const int n = state.n;
    const auto& desc = state.desc;
    const double r = desc->chart_radius;

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!(state.y(i, j).norm() < r))
                throw ChartViolation("rhs_log: |Y_" + std::to_string(i) + "," +
                                     std::to_string(j) + "| outside the chart");

    // phi(exp(Y_ab)) for every ordered pair; exp computed once per unordered
    // pair, the flipped one through the inverse
    std::vector<std::vector<AlgebraElement>> phi_of(n, std::vector<AlgebraElement>());
    for (auto& row : phi_of) row.assign(n, algebra_zero(desc));
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            GroupElement e_ab = group_exp(state.y(a, b));
            phi_of[a][b] = eval_phi(spec.phi, e_ab);
            phi_of[b][a] = eval_phi(spec.phi, group_inverse(e_ab));
        }
    }

    std::vector<AlgebraElement> out;
    out.reserve(state.upper.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            AlgebraElement y = state.y(i, j);
            Eigen::MatrixXd ad = ad_operator(y);
            Eigen::MatrixXd psi = psi_matrix(ad);

            CoordAccumulator acc_i(desc->dim(), false), acc_j(desc->dim(), false);
            for (int k = 0; k < n; ++k) {
                if (k != i) acc_i.add(phi_of[k][i].coords);
                if (k != j) acc_j.add(phi_of[k][j].coords);
            }
            Eigen::VectorXd left =
                spec.hamiltonians[i].coords + (spec.kappa / n) * acc_i.sum;
            Eigen::VectorXd right =
                spec.hamiltonians[j].coords + (spec.kappa / n) * acc_j.sum;
            // psi~ = psi + ad
            Eigen::VectorXd dy = psi * left - (psi * right + ad * right);
            out.emplace_back(desc, std::move(dy));
        }
    }
    return out;
}

std::vector<std::vector<GroupElement>> ratio_matrix(const EnsembleState& state) {
    const int n = static_cast<int>(state.elements.size());
    std::vector<GroupElement> inverses;
    inverses.reserve(n);
    for (const auto& x : state.elements) inverses.push_back(group_inverse(x));
    std::vector<std::vector<GroupElement>> r(n, std::vector<GroupElement>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i][j] = group_mul(state.elements[i], inverses[j]);
    return r;
}

std::vector<std::vector<AlgebraElement>> rhs_ratio(
    const ModelSpec& spec, const std::vector<std::vector<GroupElement>>& ratios) {
    const int n = static_cast<int>(ratios.size());
    const auto& desc = spec.desc();

    // phi(R_ki) reused across target pairs
    std::vector<std::vector<AlgebraElement>> phi_of(n, std::vector<AlgebraElement>());
    for (int k = 0; k < n; ++k) {
        phi_of[k].assign(n, algebra_zero(desc));
        for (int i = 0; i < n; ++i)
            if (k != i) phi_of[k][i] = eval_phi(spec.phi, ratios[k][i]);
    }

    std::vector<std::vector<AlgebraElement>> v(n, std::vector<AlgebraElement>());
    for (auto& row : v) row.assign(n, algebra_zero(desc));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            CoordAccumulator acc_i(desc->dim(), false), acc_j(desc->dim(), false);
            for (int k = 0; k < n; ++k) {
                if (k != i) acc_i.add(phi_of[k][i].coords);
                if (k != j) acc_j.add(phi_of[k][j].coords);
            }
            AlgebraElement own{desc, spec.hamiltonians[i].coords + (spec.kappa / n) * acc_i.sum};
            AlgebraElement other{desc,
                                 spec.hamiltonians[j].coords + (spec.kappa / n) * acc_j.sum};
            v[i][j] = own - adjoint(ratios[i][j], other);
        }
    }
    return v;
}

namespace {

GroupElement renormalize_to_group(const GroupElement& x) {
    const auto family = x.desc->family;
    const int d = x.size();
    switch (family) {
        case GroupFamily::Circle: {
            Mat m = x.m;
            m(0, 0) /= std::abs(m(0, 0));
            return {x.desc, m};
        }
        case GroupFamily::Unitary:
        case GroupFamily::SpecialUnitary: {
            Eigen::JacobiSVD<Mat> svd(x.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
            Mat u = svd.matrixU() * svd.matrixV().adjoint();
            if (family == GroupFamily::SpecialUnitary) {
                Cplx det = u.determinant();
                u *= std::exp(Cplx(0.0, -std::arg(det) / d));
            }
            return {x.desc, u};
        }
        case GroupFamily::SpecialOrthogonal: {
            Eigen::MatrixXd re = x.m.real();
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(re, Eigen::ComputeFullU | Eigen::ComputeFullV);
            Eigen::MatrixXd u = svd.matrixU() * svd.matrixV().transpose();
            return {x.desc, u.cast<Cplx>()};
        }
        case GroupFamily::SpecialLinear: {
            Cplx det = x.m.determinant();
            Cplx scale = std::exp(-std::log(det) / static_cast<double>(d));
            return {x.desc, scale * x.m};
        }
        case GroupFamily::GeneralLinearComplex: return x;
    }
    return x;
}

void enforce_drift(const ModelSpec& spec, EnsembleState& state, const IntegratorConfig& config) {
    for (auto& x : state.elements) {
        double residual = validate_membership(x);
        if (residual <= config.drift_tolerance) continue;
        if (config.chart_policy == ChartPolicy::Renormalize) {
            x = renormalize_to_group(x);
        } else {
            throw IntegrationError("membership drift " + std::to_string(residual) +
                                   " beyond tolerance at t = " + std::to_string(state.t));
        }
    }
}

}  // namespace

EnsembleState step(const ModelSpec& spec, const EnsembleState& state,
                   const IntegratorConfig& config) {
    const int n = spec.n_particles;
    const double dt = config.dt;
    EnsembleState next;
    next.t = state.t + dt;
    next.elements.resize(n);

    auto rhs_at = [&](const std::vector<GroupElement>& elements) {
        return rhs_group_impl(spec, elements, config.compensated_sum);
    };

    if (config.scheme == Scheme::LieEuler) {
        std::vector<AlgebraElement> xi = rhs_at(state.elements);
        for (int i = 0; i < n; ++i)
            next.elements[i] = group_mul(group_exp(xi[i] * dt), state.elements[i]);
        return next;
    }

    // RKMK4: X(t) = exp(Theta(t)) X_n with Theta' = psi(ad_Theta) xi(exp(Theta) X_n),
    // classical RK4 tableau on Theta.
    std::vector<AlgebraElement> k1 = rhs_at(state.elements);

    auto stage_state = [&](const std::vector<AlgebraElement>& k, double c) {
        std::vector<GroupElement> st(n);
        for (int i = 0; i < n; ++i)
            st[i] = group_mul(group_exp(k[i] * (c * dt)), state.elements[i]);
        return st;
    };
    // dexp-inverse truncated at commutator order two; enough for order four
    // and polynomial, so an exploding stage propagates to the blowup
    // detector instead of dying inside the functional calculus.
    auto corrected = [&](const std::vector<AlgebraElement>& theta,
                         std::vector<AlgebraElement> xi) {
        for (int i = 0; i < n; ++i) {
            AlgebraElement b1 = bracket(theta[i], xi[i]);
            xi[i] = xi[i] - 0.5 * b1 + (1.0 / 12.0) * bracket(theta[i], b1);
        }
        return xi;
    };

    std::vector<AlgebraElement> theta1(n, algebra_zero(spec.desc()));
    for (int i = 0; i < n; ++i) theta1[i] = k1[i] * (dt / 2.0);
    std::vector<AlgebraElement> k2 = corrected(theta1, rhs_at(stage_state(k1, 0.5)));

    std::vector<AlgebraElement> theta2(n, algebra_zero(spec.desc()));
    for (int i = 0; i < n; ++i) theta2[i] = k2[i] * (dt / 2.0);
    std::vector<AlgebraElement> k3 = corrected(theta2, rhs_at(stage_state(k2, 0.5)));

    std::vector<AlgebraElement> theta3(n, algebra_zero(spec.desc()));
    for (int i = 0; i < n; ++i) theta3[i] = k3[i] * dt;
    std::vector<AlgebraElement> k4 = corrected(theta3, rhs_at(stage_state(k3, 1.0)));

    for (int i = 0; i < n; ++i) {
        AlgebraElement theta =
            (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        next.elements[i] = group_mul(group_exp(theta), state.elements[i]);
    }
    return next;
}

double ensemble_max_norm(const EnsembleState& state) {
    double m = 0.0;
    for (const auto& x : state.elements) {
        if (!x.m.allFinite()) return std::numeric_limits<double>::infinity();
        m = std::max(m, x.m.norm());
        switch (x.desc->family) {
            case GroupFamily::GeneralLinearComplex:
            case GroupFamily::SpecialLinear: {
                Mat inv = x.m.partialPivLu().solve(Mat::Identity(x.size(), x.size()));
                if (!inv.allFinite()) return std::numeric_limits<double>::infinity();
                m = std::max(m, inv.norm());
                break;
            }
            default: break;
        }
    }
    return m;
}

std::optional<TerminationEvent> detect_blowup(const EnsembleState& state, double prev_max,
                                              const IntegratorConfig& config) {
    double m = ensemble_max_norm(state);
    if (!std::isfinite(m))
        return TerminationEvent{TerminationEvent::Kind::Blowup, state.t, state.t,
                                "non-finite state"};
    if (m > config.blowup_norm_ceiling)
        return TerminationEvent{TerminationEvent::Kind::Blowup, state.t, state.t,
                                "norm ceiling exceeded (" + std::to_string(m) + ")"};
    if (prev_max > 0.0 && m > 100.0 && m > config.blowup_growth_factor * prev_max)
        return TerminationEvent{TerminationEvent::Kind::Blowup, state.t, state.t,
                                "geometric growth (factor " + std::to_string(m / prev_max) +
                                    " in one step)"};
    return std::nullopt;
}

Trajectory integrate(const ModelSpec& spec, const EnsembleState& initial,
                     const IntegratorConfig& config) {
    if (!(config.dt > 0.0)) throw ConfigError("integrate: dt must be positive");
    if (config.t_final < 0.0) throw ConfigError("integrate: t_final must be >= 0");
    spec.validate();

    Trajectory traj;
    traj.states.push_back(initial);
    const long steps = std::lround(config.t_final / config.dt);
    double prev_max = ensemble_max_norm(initial);
    EnsembleState current = initial;

    for (long s = 1; s <= steps; ++s) {
        EnsembleState nxt;
        try {
            nxt = step(spec, current, config);
        } catch (const ChartViolation& e) {
            traj.event = TerminationEvent{TerminationEvent::Kind::ChartViolation,
                                          current.t + config.dt, current.t, e.what()};
            return traj;
        } catch (const IntegrationError& e) {
            traj.event = TerminationEvent{TerminationEvent::Kind::Blowup, current.t + config.dt,
                                          current.t, e.what()};
            return traj;
        }
        if (auto event = detect_blowup(nxt, prev_max, config)) {
            event->t_last = current.t;
            traj.event = event;
            return traj;
        }
        prev_max = ensemble_max_norm(nxt);
        current = std::move(nxt);
        if (s % config.record_stride == 0 || s == steps) {
            try {
                enforce_drift(spec, current, config);
            } catch (const IntegrationError& e) {
                traj.event = TerminationEvent{TerminationEvent::Kind::ChartViolation, current.t,
                                              traj.states.back().t, e.what()};
                return traj;
            }
            traj.states.push_back(current);
        }
    }
    return traj;
}

LogTrajectory integrate_log(const ModelSpec& spec, const LogState& initial,
                            const IntegratorConfig& config) {
    if (!(config.dt > 0.0)) throw ConfigError("integrate_log: dt must be positive");
    LogTrajectory traj;
    traj.states.push_back(initial);
    const long steps = std::lround(config.t_final / config.dt);
    const std::size_t pairs = initial.upper.size();
    LogState current = initial;

    auto plus = [&](const LogState& base, const std::vector<AlgebraElement>& dy, double c) {
        LogState out = base;
        for (std::size_t p = 0; p < pairs; ++p)
            out.upper[p] = base.upper[p] + dy[p] * c;
        return out;
    };

    for (long s = 1; s <= steps; ++s) {
        try {
            const double dt = config.dt;
            auto y1 = rhs_log(spec, current);
            auto y2 = rhs_log(spec, plus(current, y1, dt / 2.0));
            auto y3 = rhs_log(spec, plus(current, y2, dt / 2.0));
            auto y4 = rhs_log(spec, plus(current, y3, dt));
            LogState nxt = current;
            for (std::size_t p = 0; p < pairs; ++p)
                nxt.upper[p] = current.upper[p] +
                               (y1[p] + 2.0 * y2[p] + 2.0 * y3[p] + y4[p]) * (dt / 6.0);
            nxt.t = current.t + dt;
            current = std::move(nxt);
        } catch (const ChartViolation& e) {
            traj.event = TerminationEvent{TerminationEvent::Kind::ChartViolation,
                                          current.t + config.dt, current.t, e.what()};
            return traj;
        }
        if (s % config.record_stride == 0 || s == steps) traj.states.push_back(current);
    }
    return traj;
}

Trajectory splitting_transform(const AlgebraElement& h, const Trajectory& traj) {
    Trajectory out;
    out.event = traj.event;
    out.states.reserve(traj.states.size());
    for (const auto& state : traj.states) {
        EnsembleState mapped;
        mapped.t = state.t;
        GroupElement shift = group_exp(h * (-state.t));
        mapped.elements.reserve(state.elements.size());
        for (const auto& x : state.elements) mapped.elements.push_back(group_mul(shift, x));
        out.states.push_back(std::move(mapped));
    }
    return out;
}

LogState log_state_of(const EnsembleState& state) {
    const int n = static_cast<int>(state.elements.size());
    const auto& desc = state.elements.front().desc;
    LogState logs = LogState::zero(desc, n);
    logs.t = state.t;
    std::vector<GroupElement> inverses;
    inverses.reserve(n);
    for (const auto& x : state.elements) inverses.push_back(group_inverse(x));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            logs.set(i, j, group_log(group_mul(state.elements[i], inverses[j])));
    return logs;
}

EnsembleState ensemble_from_logs(const LogState& logs, const GroupElement& anchor) {
    // X_i = exp(Y_{i,0}) * anchor reproduces a state with the given ratios
    // relative to particle 0
    EnsembleState state;
    state.t = logs.t;
    state.elements.reserve(logs.n);
    for (int i = 0; i < logs.n; ++i)
        state.elements.push_back(group_mul(group_exp(logs.y(i, 0)), anchor));
    return state;
}

namespace {

void print_double(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f != nullptr) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw ConfigError("cannot open '" + path + "'");
    return f;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    FilePtr f = open_or_throw(path, "w");
    if (traj.states.empty()) return;
    const int n = static_cast<int>(traj.states.front().elements.size());
    const int d = traj.states.front().elements.front().size();
    const bool with_diagnostics = traj.diagnostics.size() == traj.states.size();
    std::fprintf(f.get(), "t");
    for (int p = 0; p < n; ++p)
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                std::fprintf(f.get(), ",x%d_%d%d_re,x%d_%d%d_im", p, r, c, p, r, c);
    if (with_diagnostics)
        std::fprintf(f.get(), ",diameter,y_inf,lock_residual,speed_mismatch,compat_residual");
    std::fprintf(f.get(), "\n");
    for (std::size_t row = 0; row < traj.states.size(); ++row) {
        const auto& state = traj.states[row];
        print_double(f.get(), state.t);
        for (const auto& x : state.elements)
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    std::fputc(',', f.get());
                    print_double(f.get(), x.m(r, c).real());
                    std::fputc(',', f.get());
                    print_double(f.get(), x.m(r, c).imag());
                }
        if (with_diagnostics) {
            const auto& rec = traj.diagnostics[row];
            for (double v : {rec.diameter, rec.y_inf, rec.lock_residual, rec.speed_mismatch,
                             rec.compat_residual}) {
                std::fputc(',', f.get());
                print_double(f.get(), v);
            }
        }
        std::fprintf(f.get(), "\n");
    }
}

void write_diagnostics_csv(const Trajectory& traj, const std::string& path) {
    FilePtr f = open_or_throw(path, "w");
    std::fprintf(f.get(), "t,diameter,y_inf,lock_residual,speed_mismatch,compat_residual\n");
    for (const auto& rec : traj.diagnostics) {
        print_double(f.get(), rec.t);
        for (double v : {rec.diameter, rec.y_inf, rec.lock_residual, rec.speed_mismatch,
                         rec.compat_residual}) {
            std::fputc(',', f.get());
            print_double(f.get(), v);
        }
        std::fprintf(f.get(), "\n");
    }
}

namespace {
constexpr char kTrajectoryMagic[8] = {'L', 'S', 'Y', 'T', 'R', 'J', '0', '1'};
}

void write_trajectory_binary(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "'");
    const std::uint32_t version = 1;
    const std::uint32_t family =
        traj.states.empty()
            ? 0
            : static_cast<std::uint32_t>(traj.states.front().elements.front().desc->family);
    const std::uint32_t d =
        traj.states.empty() ? 0 : traj.states.front().elements.front().size();
    const std::uint32_t n =
        traj.states.empty() ? 0 : static_cast<std::uint32_t>(traj.states.front().elements.size());
    const std::uint64_t rows = traj.states.size();
    out.write(kTrajectoryMagic, sizeof(kTrajectoryMagic));
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&family), sizeof(family));
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    for (const auto& state : traj.states) {
        out.write(reinterpret_cast<const char*>(&state.t), sizeof(double));
        for (const auto& x : state.elements)
            for (int r = 0; r < static_cast<int>(d); ++r)
                for (int c = 0; c < static_cast<int>(d); ++c) {
                    double re = x.m(r, c).real(), im = x.m(r, c).imag();
                    out.write(reinterpret_cast<const char*>(&re), sizeof(double));
                    out.write(reinterpret_cast<const char*>(&im), sizeof(double));
                }
    }
}

Trajectory read_trajectory_binary(const std::string& path, const GroupCatalogEntry& entry) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kTrajectoryMagic, sizeof(magic)) != 0)
        throw ConfigError("'" + path + "' is not a trajectory snapshot");
    std::uint32_t version = 0, family = 0, d = 0, n = 0;
    std::uint64_t rows = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&family), sizeof(family));
    in.read(reinterpret_cast<char*>(&d), sizeof(d));
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    if (version != 1) throw ConfigError("unsupported snapshot version");
    if (static_cast<int>(d) != entry.desc->matrix_size ||
        static_cast<GroupFamily>(family) != entry.desc->family)
        throw ConfigError("snapshot group does not match the catalog entry");
    Trajectory traj;
    for (std::uint64_t row = 0; row < rows; ++row) {
        EnsembleState state;
        in.read(reinterpret_cast<char*>(&state.t), sizeof(double));
        for (std::uint32_t p = 0; p < n; ++p) {
            Mat m(d, d);
            for (int r = 0; r < static_cast<int>(d); ++r)
                for (int c = 0; c < static_cast<int>(d); ++c) {
                    double re = 0, im = 0;
                    in.read(reinterpret_cast<char*>(&re), sizeof(double));
                    in.read(reinterpret_cast<char*>(&im), sizeof(double));
                    m(r, c) = Cplx(re, im);
                }
            state.elements.emplace_back(entry.desc, std::move(m));
        }
        if (!in) throw ConfigError("snapshot truncated");
        traj.states.push_back(std::move(state));
    }
    return traj;
}

}  // namespace liesync
