#pragma once

#include "liesync/descriptor.hpp"

namespace liesync {

/// Lie group exponential: exp(v.matrix()). Defined for every algebra
/// element; accuracy of the inverse is only guaranteed inside the chart.
GroupElement group_exp(const AlgebraElement& v);

/// Principal logarithm projected onto the algebra basis. Throws
/// ChartViolation when no principal branch exists or when |log X| reaches
/// the chart radius, and InvalidInput when the log leaves the algebra span.
AlgebraElement group_log(const GroupElement& x);

/// ad_v = [v, .] as a dim(g) x dim(g) matrix in basis coordinates.
Eigen::MatrixXd ad_operator(const AlgebraElement& v);

/// [v, w] computed through the precomputed structure constants.
AlgebraElement bracket(const AlgebraElement& v, const AlgebraElement& w);

/// Ad_g = g . g^{-1} as a matrix in basis coordinates. Throws InvalidInput
/// for singular g.
Eigen::MatrixXd adjoint_operator(const GroupElement& g);

/// Ad_g v.
AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& v);

/// Ad_{g^{-1}} v.
AlgebraElement adjoint_inverse(const GroupElement& g, const AlgebraElement& v);

/// a(v, w) = log(exp(v) exp(w)) - v - w, the quadratic-and-higher tail of
/// the Baker-Campbell-Hausdorff series. Propagates ChartViolation from the
/// logarithm when the product leaves the chart.
AlgebraElement bch_remainder(const AlgebraElement& v, const AlgebraElement& w);

/// psi(ad_Y) h with psi(z) = z/(e^z - 1): converts the right-trivialized
/// velocity of exp(Y) into the velocity of Y. Throws ChartViolation when
/// |Y| >= chart radius.
AlgebraElement dexp_inv_left(const AlgebraElement& y, const AlgebraElement& h);

/// psi~(ad_Y) h with psi~(z) = z/(1 - e^{-z}) = psi(z) + z.
AlgebraElement dexp_inv_right(const AlgebraElement& y, const AlgebraElement& h);

/// phi1(ad_Y) h with phi1(z) = (e^z - 1)/z, the inverse operator of
/// dexp_inv_left. d/dt exp(Y) = (phi1(ad_Y) Ydot) exp(Y).
AlgebraElement dexp_left(const AlgebraElement& y, const AlgebraElement& h);

/// |log(X Z^{-1})| in the descriptor inner product. Symmetric, zero iff
/// X = Z, right-invariant by construction. Throws ChartViolation when the
/// ratio leaves the chart (distance undefined at this separation).
double right_invariant_distance(const GroupElement& x, const GroupElement& z);

/// Same distance measured with an explicit SPD coefficient form instead of
/// the descriptor's.
double right_invariant_distance(const GroupElement& x, const GroupElement& z,
                                const Eigen::MatrixXd& form);

}  // namespace liesync
