#pragma once

#include "liesync/analysis.hpp"

namespace liesync {

/// Solution of the phase-locked algebraic system
///   Ad_{X_i} Lambda = H_i + (kappa/N) sum_j phi(X_j X_i^{-1}),
/// gauge-fixed to X_1 = e. Such states evolve as X_i exp(Lambda t).
struct PhaseLockedState {
    std::vector<GroupElement> elements;
    AlgebraElement lambda;
    double residual = 0.0;          // max_i adapted norm of the defining equation
    std::string gauge = "x1 = e";
};

struct PlsOptions {
    double tolerance = 1e-11;
    int max_iterations = 60;
    double fd_step = 1e-6;       // forward-difference scale for the Jacobian
    double seed_horizon = 0.0;   // 0: use 10/(kappa*lambda)
};

/// Newton iteration on (Y_2..Y_N, Lambda) with X_i = exp(Y_i) and X_1 = e.
/// Without a guess, seeds from the long-time state of a short integration
/// started at the identity ensemble. Throws SolverFailure on
/// non-convergence (carrying the best residual) and propagates
/// ChartViolation when an iterate leaves the chart.
PhaseLockedState solve_pls(const ModelSpec& spec,
                           const std::optional<EnsembleState>& initial_guess = std::nullopt,
                           const PlsOptions& options = {});

/// Residual of a candidate locked configuration under the spec.
double pls_residual(const ModelSpec& spec, const std::vector<GroupElement>& elements,
                    const AlgebraElement& lambda);

struct GaugeAlignment {
    GroupElement g;           // right factor with a_i g ~ b_i
    double mismatch = 0.0;    // max_i d(a_i g, b_i)
    double lambda_mismatch = 0.0;  // |Ad_{g^{-1}} Lambda_a - Lambda_b|
};

/// Quantifies how far two locked states are from being right-translates of
/// each other; locked states of one spec are unique up to this action.
GaugeAlignment gauge_align(const ModelSpec& spec, const PhaseLockedState& a,
                           const PhaseLockedState& b);

struct LambdaEstimate {
    AlgebraElement lambda;     // mean over particles
    double max_deviation = 0.0;  // max cross-particle spread (must be small if locked)
};

/// Lambda recovered from a full matrix of limiting ratios R_ij = X_i X_j^{-1}:
/// Lambda_i = Ad_{X_i}^{-1} (H_i + (kappa/N) sum_k phi(R_ki)) with
/// X_i = R_{i1}. Verifies the cocycle conditions R_ii = e and
/// R_ij R_jk = R_ik, and that the per-particle values agree. Throws
/// InvalidInput when the ratios are not actually locked.
LambdaEstimate lambda_from_locked_ratios(const ModelSpec& spec,
                                         const std::vector<std::vector<GroupElement>>& ratios,
                                         double tolerance = 1e-6);

/// Walks kappa downward from spec.kappa, reusing each solution as the next
/// guess; entries without a converged solution are empty. Probes the
/// existence-threshold region.
std::vector<std::pair<double, std::optional<PhaseLockedState>>> solve_pls_continuation(
    const ModelSpec& spec, const std::vector<double>& kappas, const PlsOptions& options = {});

/// Structured-text output consumed by the CLI.
void write_pls(const PhaseLockedState& state, const ModelSpec& spec, const std::string& path);

}  // namespace liesync
