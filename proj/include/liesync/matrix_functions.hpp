#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace liesync {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Matrix exponential. Closed form for sizes 1 and 2, scaling-and-squaring
/// Pade(13) for larger sizes.
Mat mat_exp(const Mat& a);

/// Principal matrix logarithm. Throws ChartViolation when an eigenvalue lies
/// on the closed negative real axis (no principal branch). Closed form for
/// sizes 1 and 2, inverse scaling-and-squaring for larger sizes.
Mat mat_log(const Mat& x);

/// phi1(z) = (e^z - 1)/z applied to a real square matrix, by power series
/// (entire function; the truncation tail is bounded by the factorial series).
Eigen::MatrixXd phi1_matrix(const Eigen::MatrixXd& m);

/// psi(z) = z/(e^z - 1) applied to a real square matrix. Primary path is the
/// Bernoulli power series, truncated when the geometric tail bound drops
/// below 1e-14; for ||m|| too close to the 2*pi convergence radius it falls
/// back to inverting phi1(m), which is exact functional calculus and needs no
/// diagonalizability. Requires spectrum inside the 2*pi disk.
Eigen::MatrixXd psi_matrix(const Eigen::MatrixXd& m);

/// Independent evaluation path for psi via eigendecomposition. Throws
/// InvalidInput when m is too far from diagonalizable (ill-conditioned
/// eigenvector matrix). Intended as a cross-check oracle.
Eigen::MatrixXd psi_matrix_eig(const Eigen::MatrixXd& m);

/// Coefficients c_n of z/(e^z-1) = sum c_n z^n (Bernoulli numbers over
/// factorials), exposed for the tail-bound tests.
const std::vector<double>& psi_series_coefficients();

}  // namespace liesync
