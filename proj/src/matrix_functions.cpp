#include "liesync/matrix_functions.hpp"

#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "liesync/errors.hpp"

namespace liesync {

namespace {

// exp of a 2x2 complex matrix: split off the trace, then
// exp(sI + B) = e^s (cosh(mu) I + sinh(mu)/mu B) with mu^2 = -det(B).
// cosh and sinh(mu)/mu are even, so the branch of the square root is
// irrelevant.
Mat exp_2x2(const Mat& a) {
    Cplx s = (a(0, 0) + a(1, 1)) / 2.0;
    Mat b = a;
    b(0, 0) -= s;
    b(1, 1) -= s;
    Cplx mu2 = b(0, 0) * b(0, 0) + b(0, 1) * b(1, 0);
    Cplx mu = std::sqrt(mu2);
    Cplx ch, shm;  // cosh(mu), sinh(mu)/mu
    if (std::abs(mu) < 1e-6) {
        // series in mu^2 to keep sinh(mu)/mu accurate near zero
        ch = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0;
        shm = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0;
    } else {
        ch = std::cosh(mu);
        shm = std::sinh(mu) / mu;
    }
    Mat r = ch * Mat::Identity(2, 2) + shm * b;
    return std::exp(s) * r;
}

bool on_negative_real_axis(const Cplx& z) {
    return z.real() <= 0.0 && std::abs(z.imag()) <= 1e-14 * (1.0 + std::abs(z.real()));
}

// Principal log of a 2x2 complex matrix through its eigenvalues
// lam_{1,2} = m +- delta: log X = alpha I + beta (X - m I), where alpha and
// beta interpolate log at the eigenvalues. The near-degenerate branch uses
// the artanh series, which also covers the defective (Jordan) case exactly.
Mat log_2x2(const Mat& x) {
    Cplx m = (x(0, 0) + x(1, 1)) / 2.0;
    Cplx det = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
    Cplx delta = std::sqrt(m * m - det);
    Cplx l1 = m + delta, l2 = m - delta;
    if (on_negative_real_axis(l1) || on_negative_real_axis(l2)) {
        throw ChartViolation("matrix logarithm: eigenvalue on the negative real axis");
    }
    Cplx alpha = (std::log(l1) + std::log(l2)) / 2.0;
    Cplx beta;
    if (std::abs(delta) < 1e-8 * std::abs(m)) {
        Cplx q = delta / m;
        beta = (1.0 + q * q / 3.0 + q * q * q * q / 5.0) / m;  // artanh(q)/(m q)
    } else {
        beta = (std::log(l1) - std::log(l2)) / (2.0 * delta);
    }
    Mat b = x;
    b(0, 0) -= m;
    b(1, 1) -= m;
    return alpha * Mat::Identity(2, 2) + beta * b;
}

}  // namespace

Mat mat_exp(const Mat& a) {
    if (!a.allFinite()) throw InvalidInput("mat_exp: non-finite entries");
    if (a.rows() != a.cols()) throw InvalidInput("mat_exp: matrix not square");
    const auto n = a.rows();
    if (n == 1) {
        Mat r(1, 1);
        r(0, 0) = std::exp(a(0, 0));
        return r;
    }
    if (n == 2) return exp_2x2(a);
    return a.exp();
}

Mat mat_log(const Mat& x) {
    if (!x.allFinite()) throw InvalidInput("mat_log: non-finite entries");
    if (x.rows() != x.cols()) throw InvalidInput("mat_log: matrix not square");
    const auto n = x.rows();
    if (n == 1) {
        if (on_negative_real_axis(x(0, 0)))
            throw ChartViolation("matrix logarithm: value on the negative real axis");
        Mat r(1, 1);
        r(0, 0) = std::log(x(0, 0));
        return r;
    }
    if (n == 2) return log_2x2(x);
    Eigen::ComplexEigenSolver<Mat> es(x, /*computeEigenvectors=*/false);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        if (on_negative_real_axis(es.eigenvalues()(i)))
            throw ChartViolation("matrix logarithm: eigenvalue on the negative real axis");
    }
    return x.log();
}

const std::vector<double>& psi_series_coefficients() {
    // c_0 = 1 and sum_{k=0..n} c_k / (n+1-k)! = 0 for n >= 1, from
    // multiplying the series by (e^z - 1)/z.
    static const std::vector<double> coeffs = [] {
        const int n_max = 80;
        std::vector<double> c(n_max + 1, 0.0);
        std::vector<double> inv_fact(n_max + 3, 1.0);
        for (int k = 1; k < static_cast<int>(inv_fact.size()); ++k)
            inv_fact[k] = inv_fact[k - 1] / k;
        c[0] = 1.0;
        for (int n = 1; n <= n_max; ++n) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += c[k] * inv_fact[n + 1 - k];
            c[n] = -s;
        }
        return c;
    }();
    return coeffs;
}

Eigen::MatrixXd phi1_matrix(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    for (int k = 1; k <= 200; ++k) {
        term = (term * m) / (k + 1.0);
        sum += term;
        // tail <= ||term|| * sum_j (||m||/(k+2))^j, geometric once k+2 > ||m||
        double tn = term.cwiseAbs().rowwise().sum().maxCoeff();
        double q = norm / (k + 2.0);
        if (q < 0.9 && tn * q / (1.0 - q) < 1e-16) break;
    }
    return sum;
}

Eigen::MatrixXd psi_matrix(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) throw InvalidInput("psi_matrix: non-finite entries");
    const int n = static_cast<int>(m.rows());
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm >= 2.0 * M_PI)
        throw ChartViolation("psi_matrix: operator norm at or beyond the 2*pi radius");
    if (norm <= 4.0) {
        // Bernoulli series sum c_k m^k; |c_k| <= 4 (2 pi)^{-k} for k >= 2,
        // so the tail after degree k is below 4 q^{k+1}/(1-q), q = norm/(2 pi).
        const auto& c = psi_series_coefficients();
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd sum = c[0] * power;
        const double q = norm / (2.0 * M_PI);
        double qk = 1.0;
        for (std::size_t k = 1; k < c.size(); ++k) {
            power = power * m;
            sum += c[k] * power;
            qk *= q;
            if (k >= 2 && 4.0 * qk * q / (1.0 - q) < 1e-14) return sum;
        }
        return sum;
    }
    // Exact alternative: psi(m) = phi1(m)^{-1}; phi1 has no zero eigenvalues
    // inside the 2*pi disk and the series for it converges everywhere.
    Eigen::MatrixXd p = phi1_matrix(m);
    return p.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXd psi_matrix_eig(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.cast<Cplx>());
    if (es.info() != Eigen::Success)
        throw InvalidInput("psi_matrix_eig: eigendecomposition failed");
    Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v);
    double rcond = lu.rcond();
    if (!(rcond > 1e-10))
        throw InvalidInput("psi_matrix_eig: eigenvector matrix ill-conditioned");
    Eigen::VectorXcd f(n);
    for (int i = 0; i < n; ++i) {
        Cplx z = es.eigenvalues()(i);
        if (std::abs(z) < 1e-8) {
            f(i) = 1.0 - z / 2.0 + z * z / 12.0;
        } else {
            f(i) = z / (std::exp(z) - 1.0);
        }
    }
    Eigen::MatrixXcd r = v * f.asDiagonal() * lu.solve(Eigen::MatrixXcd::Identity(n, n));
    return r.real();
}

}  // namespace liesync
