#include "liesync/lie_ops.hpp"

#include "liesync/errors.hpp"

namespace liesync {

GroupElement group_exp(const AlgebraElement& v) {
    if (!v.coords.allFinite()) throw InvalidInput("group_exp: non-finite coordinates");
    return {v.desc, mat_exp(v.matrix())};
}

AlgebraElement group_log(const GroupElement& x) {
    Mat l = mat_log(x.m);  // throws ChartViolation off the principal branch
    double residual = 0.0;
    Eigen::VectorXd c = x.desc->project(l, &residual);
    if (residual > 1e-9 * std::max(1.0, l.norm()))
        throw InvalidInput("group_log: logarithm left the algebra span (residual " +
                           std::to_string(residual) + ")");
    AlgebraElement v{x.desc, std::move(c)};
    if (v.norm() >= x.desc->chart_radius)
        throw ChartViolation("group_log: |log X| = " + std::to_string(v.norm()) +
                             " outside the chart radius " +
                             std::to_string(x.desc->chart_radius));
    return v;
}

Eigen::MatrixXd ad_operator(const AlgebraElement& v) {
    const auto& desc = *v.desc;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(desc.dim(), desc.dim());
    for (int k = 0; k < desc.dim(); ++k) a += v.coords(k) * desc.ad_basis[k];
    return a;
}

AlgebraElement bracket(const AlgebraElement& v, const AlgebraElement& w) {
    return {v.desc, ad_operator(v) * w.coords};
}

Eigen::MatrixXd adjoint_operator(const GroupElement& g) {
    const auto& desc = *g.desc;
    GroupElement ginv = group_inverse(g);
    Eigen::MatrixXd a(desc.dim(), desc.dim());
    for (int b = 0; b < desc.dim(); ++b) {
        Mat col = g.m * desc.basis[b] * ginv.m;
        a.col(b) = desc.project(col);
    }
    return a;
}

AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& v) {
    Mat m = g.m * v.matrix() * group_inverse(g).m;
    return AlgebraElement::from_matrix(v.desc, m);
}

AlgebraElement adjoint_inverse(const GroupElement& g, const AlgebraElement& v) {
    Mat m = group_inverse(g).m * v.matrix() * g.m;
    return AlgebraElement::from_matrix(v.desc, m);
}

AlgebraElement bch_remainder(const AlgebraElement& v, const AlgebraElement& w) {
    GroupElement p = group_mul(group_exp(v), group_exp(w));
    AlgebraElement u = group_log(p);
    return u - v - w;
}

namespace {

void check_in_chart(const AlgebraElement& y, const char* who) {
    double n = y.norm();
    if (!(n < y.desc->chart_radius))
        throw ChartViolation(std::string(who) + ": |Y| = " + std::to_string(n) +
                             " outside the chart radius");
}

}  // namespace

AlgebraElement dexp_inv_left(const AlgebraElement& y, const AlgebraElement& h) {
    check_in_chart(y, "dexp_inv_left");
    Eigen::MatrixXd psi = psi_matrix(ad_operator(y));
    return {y.desc, psi * h.coords};
}

AlgebraElement dexp_inv_right(const AlgebraElement& y, const AlgebraElement& h) {
    check_in_chart(y, "dexp_inv_right");
    // z/(1 - e^{-z}) = z/(e^z - 1) + z
    Eigen::MatrixXd a = ad_operator(y);
    Eigen::MatrixXd psi = psi_matrix(a);
    return {y.desc, psi * h.coords + a * h.coords};
}

AlgebraElement dexp_left(const AlgebraElement& y, const AlgebraElement& h) {
    Eigen::MatrixXd phi1 = phi1_matrix(ad_operator(y));
    return {y.desc, phi1 * h.coords};
}

double right_invariant_distance(const GroupElement& x, const GroupElement& z) {
    return right_invariant_distance(x, z, x.desc->inner_product);
}

double right_invariant_distance(const GroupElement& x, const GroupElement& z,
                                const Eigen::MatrixXd& form) {
    GroupElement ratio = group_mul(x, group_inverse(z));
    AlgebraElement y = group_log(ratio);
    return std::sqrt(y.coords.dot(form * y.coords));
}

}  // namespace liesync
