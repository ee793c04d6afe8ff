#include "liesync/interactions.hpp"

#include <algorithm>

#include "liesync/errors.hpp"
#include "liesync/lie_ops.hpp"

namespace liesync {

bool InteractionFunction::compatible_with(GroupFamily family) const {
    return std::find(compatible_families.begin(), compatible_families.end(), family) !=
           compatible_families.end();
}

AlgebraElement eval_phi(const InteractionFunction& phi, const GroupElement& x) {
    Mat m = phi.eval_matrix(x.m);
    if (!m.allFinite())
        throw InvalidInput("phi '" + phi.id + "': non-finite value");
    return AlgebraElement::from_matrix(x.desc, m);
}

namespace {

Mat general_inverse(const Mat& x) {
    const auto d = x.rows();
    if (d == 1) {
        Mat inv(1, 1);
        inv(0, 0) = 1.0 / x(0, 0);
        return inv;
    }
    if (d == 2) {
        Cplx det = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
        Mat inv(2, 2);
        inv << x(1, 1), -x(0, 1), -x(1, 0), x(0, 0);
        return Mat(inv / det);
    }
    return x.partialPivLu().solve(Mat::Identity(d, d));
}

Mat half_difference(const Mat& x) { return 0.5 * (x - general_inverse(x)); }

Mat traceless_half_difference(const Mat& x) {
    Mat h = half_difference(x);
    Cplx tr = h.trace() / static_cast<double>(x.rows());
    return h - tr * Mat::Identity(x.rows(), x.cols());
}

Mat deville_square(const Mat& x) {
    Mat x2 = x * x;
    return 0.5 * (x2 - general_inverse(x2));
}

}  // namespace

const std::vector<InteractionFunction>& phi_catalog() {
    static const std::vector<InteractionFunction> catalog = {
        {"kuramoto_sin", half_difference, true, {GroupFamily::Circle}},
        {"lohe_unitary",
         [](const Mat& u) { return Mat(0.5 * (u - u.adjoint())); },
         true,
         {GroupFamily::Circle, GroupFamily::Unitary}},
        {"lohe_matrix",
         half_difference,
         true,
         {GroupFamily::Circle, GroupFamily::Unitary, GroupFamily::SpecialOrthogonal,
          GroupFamily::GeneralLinearComplex}},
        {"sl_traceless",
         traceless_half_difference,
         true,
         {GroupFamily::SpecialUnitary, GroupFamily::SpecialLinear}},
        {"deville_f",
         deville_square,
         true,
         {GroupFamily::Circle, GroupFamily::Unitary, GroupFamily::SpecialOrthogonal,
          GroupFamily::GeneralLinearComplex}},
    };
    return catalog;
}

const InteractionFunction& phi_by_id(const std::string& id) {
    for (const auto& phi : phi_catalog())
        if (phi.id == id) return phi;
    throw ConfigError("unknown interaction function '" + id + "'");
}

Eigen::MatrixXd jacobian_at_identity(const InteractionFunction& phi,
                                     const GroupCatalogEntry& entry) {
    const auto& desc = entry.desc;
    const int n = desc->dim();
    auto central = [&](double eps) {
        Eigen::MatrixXd d(n, n);
        for (int a = 0; a < n; ++a) {
            AlgebraElement e{desc, Eigen::VectorXd::Unit(n, a)};
            Eigen::VectorXd plus = eval_phi(phi, group_exp(e * eps)).coords;
            Eigen::VectorXd minus = eval_phi(phi, group_exp(e * (-eps))).coords;
            d.col(a) = (plus - minus) / (2.0 * eps);
        }
        return d;
    };
    const double eps = 1e-3;
    Eigen::MatrixXd coarse = central(eps);
    Eigen::MatrixXd fine = central(eps / 2.0);
    Eigen::MatrixXd j = (4.0 * fine - coarse) / 3.0;
    if (!j.allFinite())
        throw InvalidInput("jacobian_at_identity: phi not differentiable near e");
    return j;
}

HypothesisReport check_hypothesis_H(const InteractionFunction& phi,
                                    const GroupCatalogEntry& entry) {
    HypothesisReport report;
    report.phi_at_identity = eval_phi(phi, group_identity(entry.desc)).norm();
    if (report.phi_at_identity > 1e-12) {
        report.detail = "phi(e) != 0";
        return report;
    }
    try {
        report.jacobian = jacobian_at_identity(phi, entry);
    } catch (const Error& e) {
        report.detail = e.what();
        return report;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(report.jacobian);
    double min_re = std::numeric_limits<double>::infinity();
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        report.spectrum.push_back(es.eigenvalues()(i));
        min_re = std::min(min_re, es.eigenvalues()(i).real());
    }
    report.pass = min_re > 0.0;
    if (!report.pass) report.detail = "eigenvalue with nonpositive real part";
    return report;
}

AdaptedMetric build_adapted_metric(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    Eigen::EigenSolver<Eigen::MatrixXd> es(a);
    double min_re = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) min_re = std::min(min_re, es.eigenvalues()(i).real());
    if (!(min_re > 0.0))
        throw InvalidInput("build_adapted_metric: spectrum not in the right half-plane");

    // vec(P A + A^T P) = (A^T kron I + I kron A^T) vec(P) = vec(2 I)
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                // row (i,j): sum_k P(i,k) A(k,j) + A(k,i) P(k,j)
                sys(i + n * j, i + n * k) += a(k, j);
                sys(i + n * j, k + n * j) += a(k, i);
            }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
    for (int i = 0; i < n; ++i) rhs(i + n * i) = 2.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    Eigen::VectorXd vec_p = lu.solve(rhs);

    AdaptedMetric metric;
    metric.P.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) metric.P(i, j) = vec_p(i + n * j);
    metric.P = 0.5 * (metric.P + metric.P.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pes(metric.P);
    if (!(pes.eigenvalues().minCoeff() > 0.0))
        throw InvalidInput("build_adapted_metric: Lyapunov solution not positive definite");

    // largest lambda with <v, A v>_P >= lambda |v|_P^2: minimum eigenvalue of
    // the pencil ((PA + A^T P)/2, P)
    Eigen::MatrixXd s = 0.5 * (metric.P * a + a.transpose() * metric.P);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(s, metric.P);
    metric.lambda = ges.eigenvalues().minCoeff();

    metric.conditioning_warning = min_re < 1e-8 || lu.rcond() < 1e-12;
    return metric;
}

AdaptedMetric frobenius_metric(int dim) {
    AdaptedMetric metric;
    metric.P = Eigen::MatrixXd::Identity(dim, dim);
    metric.lambda = 0.0;
    return metric;
}

double equivariance_residual(const InteractionFunction& phi, const GroupCatalogEntry& entry,
                             int samples, std::uint64_t seed) {
    double worst = 0.0;
    const double r = entry.desc->chart_radius / 2.0;
    for (int k = 0; k < samples; ++k) {
        GroupElement g = random_near_identity(entry, r, seed + 2 * k);
        GroupElement h = random_near_identity(entry, r, seed + 2 * k + 1);
        AlgebraElement lhs = adjoint(g, eval_phi(phi, h));
        GroupElement conj = group_mul(group_mul(g, h), group_inverse(g));
        AlgebraElement rhs = eval_phi(phi, conj);
        worst = std::max(worst, (lhs - rhs).norm());
    }
    return worst;
}

}  // namespace liesync
