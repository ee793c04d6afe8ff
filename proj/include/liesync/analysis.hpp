#pragma once

#include "liesync/dynamics.hpp"

namespace liesync {

/// max_{i,j} |Y_ij| in the given metric.
double lyapunov_y_inf(const LogState& state, const AdaptedMetric& metric);

/// max_{i,j} |Y_ij - Y~_ij|. Throws InvalidInput on shape mismatch.
double lyapunov_diff(const LogState& a, const LogState& b, const AdaptedMetric& metric);

/// Max defect of the compatibility equations
/// Y_ik = Y_ij + Y_jk + a(Y_ij, Y_jk) over index triples.
double compatibility_residual(const LogState& state, const AdaptedMetric& metric);

struct FitResult {
    double rate = 0.0;  // positive decay constant
    double r_squared = 0.0;
};

/// Least-squares slope of log(value) against t on [t0, t1]; the rate is the
/// negated slope. Throws FitError when fewer than 10 samples fall in the
/// window or any value there is nonpositive.
FitResult fit_decay_rate(const std::vector<std::pair<double, double>>& series, double t0,
                         double t1);

/// max over ordered pairs of the adapted norm of the ratio velocities; zero
/// exactly on phase-locked states.
double lock_residual(const ModelSpec& spec, const EnsembleState& state);

/// Left-trivialized velocities Ad_{X_i^{-1}} xi_i.
std::vector<AlgebraElement> left_velocities(const ModelSpec& spec, const EnsembleState& state);

/// max_i |Ad_{X_i^{-1}} xi_i - M| in the adapted metric.
double normalized_speed_mismatch(const ModelSpec& spec, const EnsembleState& state,
                                 const AlgebraElement& m);

/// Diagnostics row for one state. Quantities requiring ratio logarithms are
/// NaN when some ratio is outside the chart; the velocity-based ones are
/// always computed.
DiagnosticsRecord compute_diagnostics(const ModelSpec& spec, const EnsembleState& state);

/// Fill traj.diagnostics from the recorded states.
void attach_diagnostics(const ModelSpec& spec, Trajectory& traj);

/// Series (t, y_inf) extracted from attached diagnostics.
std::vector<std::pair<double, double>> diameter_series(const Trajectory& traj);

}  // namespace liesync
