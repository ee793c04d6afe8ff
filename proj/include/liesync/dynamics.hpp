#pragma once

#include <optional>
#include <vector>

#include "liesync/interactions.hpp"

namespace liesync {

/// Full description of one model instance.
struct ModelSpec {
    GroupCatalogEntry entry;
    int n_particles = 0;
    double kappa = 0.0;                        // coupling strength, 1/time
    std::vector<AlgebraElement> hamiltonians;  // one per particle, in g
    InteractionFunction phi;
    AdaptedMetric metric;

    const DescriptorPtr& desc() const { return entry.desc; }
    /// max_i |H_i| in the adapted metric.
    double hamiltonian_sup_norm() const;
    /// Throws ConfigError when N < 2, kappa <= 0, sizes disagree, or phi is
    /// incompatible with the group family.
    void validate() const;
};

/// Convenience builder: metric from the interaction's identity Jacobian.
ModelSpec make_model(GroupCatalogEntry entry, int n_particles, double kappa,
                     std::vector<AlgebraElement> hamiltonians, const InteractionFunction& phi);

struct EnsembleState {
    double t = 0.0;
    std::vector<GroupElement> elements;
};

/// Logarithms of the pairwise ratios, Y_ij = log(X_i X_j^{-1}). Only the
/// upper triangle i < j is stored; Y_ji = -Y_ij is produced on read and
/// Y_ii = 0.
struct LogState {
    double t = 0.0;
    int n = 0;
    DescriptorPtr desc;
    std::vector<AlgebraElement> upper;

    static LogState zero(const DescriptorPtr& desc, int n);
    int index(int i, int j) const;  // requires i < j
    AlgebraElement y(int i, int j) const;
    void set(int i, int j, const AlgebraElement& v);  // requires i < j
};

enum class Scheme { LieEuler, RKMK4 };
enum class ChartPolicy { Abort, Renormalize };

struct IntegratorConfig {
    Scheme scheme = Scheme::RKMK4;
    double dt = 1e-3;
    double t_final = 0.0;
    int record_stride = 1;
    double drift_tolerance = 1e-6;
    ChartPolicy chart_policy = ChartPolicy::Abort;
    double blowup_norm_ceiling = 1e8;
    double blowup_growth_factor = 4.0;
    bool compensated_sum = false;

    /// Default step size 1e-3 * min(1, 1/kappa): stiffness from large kappa
    /// is resolved at the same relative accuracy.
    static double default_dt(double kappa) { return 1e-3 * std::min(1.0, 1.0 / kappa); }
};

struct TerminationEvent {
    enum class Kind { Blowup, ChartViolation };
    Kind kind;
    double t = 0.0;       // time of the step at which the event fired
    double t_last = 0.0;  // last time with a valid recorded state
    std::string detail;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double diameter = 0.0;        // max pairwise right-invariant distance
    double y_inf = 0.0;           // max_ij |Y_ij|, equal to diameter in-chart
    double lock_residual = 0.0;   // max ratio velocity norm
    double speed_mismatch = 0.0;  // against the mean left-trivialized velocity
    double compat_residual = 0.0; // max triple defect of the compatibility equations
};

struct Trajectory {
    std::vector<EnsembleState> states;
    std::vector<DiagnosticsRecord> diagnostics;  // filled by attach_diagnostics
    std::optional<TerminationEvent> event;
};

struct LogTrajectory {
    std::vector<LogState> states;
    std::optional<TerminationEvent> event;
};

/// Right-trivialized velocities xi_i = H_i + (kappa/N) sum_j phi(X_j X_i^{-1}),
/// so that Xdot_i = xi_i X_i. Summation over j in ascending index order.
std::vector<AlgebraElement> rhs_group(const ModelSpec& spec, const EnsembleState& state);

/// Velocities of the ratio logarithms:
/// Ydot_ij = psi(ad_Y) (H_i + (kappa/N) sum_k phi(exp(Y_ki)))
///         - psi~(ad_Y) (H_j + (kappa/N) sum_k phi(exp(Y_kj))).
/// Returned packed like LogState.upper. Throws ChartViolation naming the
/// offending pair when some |Y_ij| reaches the chart radius.
std::vector<AlgebraElement> rhs_log(const ModelSpec& spec, const LogState& state);

/// Full N x N ratio matrix R_ij = X_i X_j^{-1}.
std::vector<std::vector<GroupElement>> ratio_matrix(const EnsembleState& state);

/// Right-trivialized velocities of the ratios,
/// V_ij = H_i - Ad_{R_ij} H_j + (kappa/N) sum_k [phi(R_ki) - Ad_{R_ij} phi(R_kj)],
/// for all ordered pairs (diagonal zero).
std::vector<std::vector<AlgebraElement>> rhs_ratio(
    const ModelSpec& spec, const std::vector<std::vector<GroupElement>>& ratios);

/// One step of the configured scheme. LieEuler: X <- exp(dt xi) X. RKMK4:
/// four stages in the algebra with dexp-inverse corrections.
EnsembleState step(const ModelSpec& spec, const EnsembleState& state,
                   const IntegratorConfig& config);

/// Fixed-step integration to t_final, recording every record_stride-th state
/// (plus the initial and final ones). Terminates early with an event record
/// on blowup or chart violation.
Trajectory integrate(const ModelSpec& spec, const EnsembleState& initial,
                     const IntegratorConfig& config);

/// Classical RK4 directly on the (flat) log coordinates.
LogTrajectory integrate_log(const ModelSpec& spec, const LogState& initial,
                            const IntegratorConfig& config);

/// Blowup test for the current state: non-finite entries, norm of X or
/// X^{-1} above the ceiling, or geometric per-step growth. prev_max is the
/// previous step's norm measure (pass 0 on the first step).
std::optional<TerminationEvent> detect_blowup(const EnsembleState& state, double prev_max,
                                              const IntegratorConfig& config);

/// max_i max(||X_i||, ||X_i^{-1}||) (inverse norms only for the non-compact
/// families).
double ensemble_max_norm(const EnsembleState& state);

/// Left-translates every recorded state by exp(-H t): the identical-H
/// solution-splitting transformation. Requires an identical-Hamiltonian
/// scenario with equivariant phi to be meaningful.
Trajectory splitting_transform(const AlgebraElement& h, const Trajectory& traj);

/// Log coordinates of a group state. Throws ChartViolation when a ratio
/// leaves the chart.
LogState log_state_of(const EnsembleState& state);

/// Reconstruct ratios exp(Y_ij) and compare against another log state.
EnsembleState ensemble_from_logs(const LogState& logs, const GroupElement& anchor);

// --- serialization ---

/// Columnar CSV: t, then each particle's matrix flattened row-major as
/// re/im pairs. Deterministic %.17g formatting.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Diagnostics CSV: t, diameter, y_inf, lock_residual, speed_mismatch,
/// compat_residual.
void write_diagnostics_csv(const Trajectory& traj, const std::string& path);

/// Versioned binary snapshot (magic, version, family, d, N, row count,
/// little-endian doubles). Exact resume round-trip.
void write_trajectory_binary(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_binary(const std::string& path, const GroupCatalogEntry& entry);

}  // namespace liesync
