#pragma once

#include <functional>
#include <vector>

#include "liesync/groups.hpp"

namespace liesync {

/// Pairwise interaction map phi: G -> g. eval_matrix produces the raw matrix
/// value; eval projects it into the algebra and enforces the residual bound.
struct InteractionFunction {
    std::string id;
    std::function<Mat(const Mat&)> eval_matrix;
    /// Conjugation equivariance Ad_g phi(h) = phi(g h g^{-1}); all the
    /// shipped entries are matrix functions, hence equivariant.
    bool equivariant = true;
    std::vector<GroupFamily> compatible_families;

    bool compatible_with(GroupFamily family) const;
};

/// phi(X) projected into the algebra of X's group.
AlgebraElement eval_phi(const InteractionFunction& phi, const GroupElement& x);

/// The shipped interaction catalog:
///   kuramoto_sin  - z -> (z - z^{-1})/2 on the circle (sin in angle form)
///   lohe_unitary  - U -> (U - U^H)/2 on the unitary group
///   lohe_matrix   - X -> (X - X^{-1})/2 on GL, U, SO, circle
///   sl_traceless  - trace-subtracted (X - X^{-1})/2 on SU and SL
///   deville_f     - (f(X) - f(X^{-1}))/2 with f(X) = X^2
const std::vector<InteractionFunction>& phi_catalog();

/// Lookup by id; throws ConfigError for unknown ids.
const InteractionFunction& phi_by_id(const std::string& id);

/// d(phi)_e in basis coordinates, by central differences of phi(exp(eps e_a))
/// with one step of Richardson extrapolation (errors O(eps^4), entries
/// accurate to ~1e-8 at eps = 1e-3).
Eigen::MatrixXd jacobian_at_identity(const InteractionFunction& phi,
                                     const GroupCatalogEntry& entry);

struct HypothesisReport {
    bool pass = false;
    std::vector<Cplx> spectrum;
    double phi_at_identity = 0.0;  // norm of phi(e)
    Eigen::MatrixXd jacobian;
    std::string detail;
};

/// phi(e) = 0, d(phi)_e computable, and every eigenvalue of d(phi)_e in the
/// open right half-plane. Failures are report contents, not errors.
HypothesisReport check_hypothesis_H(const InteractionFunction& phi,
                                    const GroupCatalogEntry& entry);

/// Inner product on coefficient vectors under which the interaction is
/// uniformly attractive: <v, A v>_P >= lambda |v|_P^2 with A = d(phi)_e.
struct AdaptedMetric {
    Eigen::MatrixXd P;
    double lambda = 0.0;
    bool conditioning_warning = false;

    double norm(const Eigen::VectorXd& coords) const {
        return std::sqrt(coords.dot(P * coords));
    }
    double norm(const AlgebraElement& v) const { return norm(v.coords); }
};

/// Solves P A + A^T P = 2 I for the SPD P and reports the largest lambda
/// with <v, A v>_P >= lambda |v|_P^2, the minimum eigenvalue of the pencil
/// ((PA + A^T P)/2, P). Requires spectrum(A) in the open right half-plane.
AdaptedMetric build_adapted_metric(const Eigen::MatrixXd& a);

/// Identity form of matching dimension (the raw Frobenius metric).
AdaptedMetric frobenius_metric(int dim);

/// Max residual of Ad_g phi(h) - phi(g h g^{-1}) over sampled (g, h) pairs.
double equivariance_residual(const InteractionFunction& phi, const GroupCatalogEntry& entry,
                             int samples, std::uint64_t seed);

}  // namespace liesync
