#include "liesync/analysis.hpp"

#include <cmath>
#include <limits>

#include "liesync/errors.hpp"
#include "liesync/lie_ops.hpp"

namespace liesync {

double lyapunov_y_inf(const LogState& state, const AdaptedMetric& metric) {
    double m = 0.0;
    for (const auto& y : state.upper) m = std::max(m, metric.norm(y));
    return m;
}

double lyapunov_diff(const LogState& a, const LogState& b, const AdaptedMetric& metric) {
    if (a.n != b.n || a.desc->matrix_size != b.desc->matrix_size ||
        a.desc->family != b.desc->family)
        throw InvalidInput("lyapunov_diff: states from different ensembles");
    double m = 0.0;
    for (std::size_t p = 0; p < a.upper.size(); ++p)
        m = std::max(m, metric.norm(a.upper[p] - b.upper[p]));
    return m;
}

double compatibility_residual(const LogState& state, const AdaptedMetric& metric) {
    double worst = 0.0;
    for (int i = 0; i < state.n; ++i)
        for (int k = 0; k < state.n; ++k) {
            if (i == k) continue;
            for (int j = 0; j < state.n; ++j) {
                if (j == i || j == k) continue;
                AlgebraElement lhs = state.y(i, k);
                AlgebraElement rhs = state.y(i, j) + state.y(j, k) +
                                     bch_remainder(state.y(i, j), state.y(j, k));
                worst = std::max(worst, metric.norm(lhs - rhs));
            }
        }
    return worst;
}

FitResult fit_decay_rate(const std::vector<std::pair<double, double>>& series, double t0,
                         double t1) {
    std::vector<std::pair<double, double>> window;
    for (const auto& [t, v] : series) {
        if (t < t0 || t > t1) continue;
        if (!(v > 0.0))
            throw FitError("fit_decay_rate: nonpositive value " + std::to_string(v) + " at t = " +
                           std::to_string(t));
        window.emplace_back(t, std::log(v));
    }
    if (window.size() < 10)
        throw FitError("fit_decay_rate: only " + std::to_string(window.size()) +
                       " samples in the window");
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    const double n = static_cast<double>(window.size());
    for (const auto& [t, y] : window) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        syy += y * y;
    }
    double denom = n * stt - st * st;
    double slope = (n * sty - st * sy) / denom;
    FitResult fit;
    fit.rate = -slope;
    double ss_tot = syy - sy * sy / n;
    double intercept = (sy - slope * st) / n;
    double ss_res = 0.0;
    for (const auto& [t, y] : window) {
        double e = y - (intercept + slope * t);
        ss_res += e * e;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

double lock_residual(const ModelSpec& spec, const EnsembleState& state) {
    auto ratios = ratio_matrix(state);
    auto velocities = rhs_ratio(spec, ratios);
    double m = 0.0;
    for (int i = 0; i < spec.n_particles; ++i)
        for (int j = 0; j < spec.n_particles; ++j)
            if (i != j) m = std::max(m, spec.metric.norm(velocities[i][j]));
    return m;
}

std::vector<AlgebraElement> left_velocities(const ModelSpec& spec, const EnsembleState& state) {
    std::vector<AlgebraElement> xi = rhs_group(spec, state);
    for (int i = 0; i < spec.n_particles; ++i)
        xi[i] = adjoint_inverse(state.elements[i], xi[i]);
    return xi;
}

double normalized_speed_mismatch(const ModelSpec& spec, const EnsembleState& state,
                                 const AlgebraElement& m) {
    double worst = 0.0;
    for (const auto& v : left_velocities(spec, state))
        worst = std::max(worst, spec.metric.norm(v - m));
    return worst;
}

DiagnosticsRecord compute_diagnostics(const ModelSpec& spec, const EnsembleState& state) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    try {
        LogState logs = log_state_of(state);
        rec.y_inf = lyapunov_y_inf(logs, spec.metric);
        rec.diameter = rec.y_inf;  // same quantity while all ratios are in-chart
        rec.compat_residual = compatibility_residual(logs, spec.metric);
    } catch (const ChartViolation&) {
        rec.y_inf = rec.diameter = rec.compat_residual =
            std::numeric_limits<double>::quiet_NaN();
    }
    rec.lock_residual = lock_residual(spec, state);
    std::vector<AlgebraElement> lv = left_velocities(spec, state);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(spec.desc()->dim());
    for (const auto& v : lv) mean += v.coords;
    mean /= static_cast<double>(lv.size());
    AlgebraElement m_hat{spec.desc(), mean};
    double worst = 0.0;
    for (const auto& v : lv) worst = std::max(worst, spec.metric.norm(v - m_hat));
    rec.speed_mismatch = worst;
    return rec;
}

void attach_diagnostics(const ModelSpec& spec, Trajectory& traj) {
    traj.diagnostics.clear();
    traj.diagnostics.reserve(traj.states.size());
    for (const auto& state : traj.states)
        traj.diagnostics.push_back(compute_diagnostics(spec, state));
}

std::vector<std::pair<double, double>> diameter_series(const Trajectory& traj) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.diagnostics.size());
    for (const auto& rec : traj.diagnostics) out.emplace_back(rec.t, rec.diameter);
    return out;
}

}  // namespace liesync
