#include "liesync/descriptor.hpp"

#include "liesync/errors.hpp"

namespace liesync {

std::string family_id(GroupFamily family) {
    switch (family) {
        case GroupFamily::Circle: return "circle";
        case GroupFamily::Unitary: return "u";
        case GroupFamily::SpecialUnitary: return "su";
        case GroupFamily::GeneralLinearComplex: return "gl_c";
        case GroupFamily::SpecialLinear: return "sl_c";
        case GroupFamily::SpecialOrthogonal: return "so";
    }
    throw InvalidInput("unknown group family");
}

GroupFamily family_from_id(const std::string& id) {
    if (id == "circle") return GroupFamily::Circle;
    if (id == "u") return GroupFamily::Unitary;
    if (id == "su") return GroupFamily::SpecialUnitary;
    if (id == "gl_c") return GroupFamily::GeneralLinearComplex;
    if (id == "sl_c") return GroupFamily::SpecialLinear;
    if (id == "so") return GroupFamily::SpecialOrthogonal;
    throw ConfigError("unknown group id '" + id + "'");
}

Eigen::VectorXd GroupDescriptor::project(const Mat& m, double* residual) const {
    Eigen::VectorXd c(dim());
    for (int a = 0; a < dim(); ++a) {
        // basis is orthonormal wrt Re tr(A^H B), so least squares reduces to
        // inner products
        c(a) = (basis[a].adjoint() * m).trace().real();
    }
    if (residual != nullptr) {
        Mat rec = materialize(c);
        *residual = (m - rec).norm();
    }
    return c;
}

Mat GroupDescriptor::materialize(const Eigen::VectorXd& coords) const {
    Mat m = Mat::Zero(matrix_size, matrix_size);
    for (int a = 0; a < dim(); ++a) m += coords(a) * basis[a];
    return m;
}

double GroupDescriptor::coord_norm(const Eigen::VectorXd& coords) const {
    return std::sqrt(coords.dot(inner_product * coords));
}

AlgebraElement AlgebraElement::from_matrix(const DescriptorPtr& desc, const Mat& m) {
    if (!m.allFinite()) throw InvalidInput("algebra element: non-finite entries");
    if (m.rows() != desc->matrix_size || m.cols() != desc->matrix_size)
        throw InvalidInput("algebra element: wrong matrix size");
    double residual = 0.0;
    Eigen::VectorXd c = desc->project(m, &residual);
    if (residual > 1e-10 * std::max(1.0, m.norm()))
        throw InvalidInput("algebra element: matrix is not in the algebra span (residual " +
                           std::to_string(residual) + ")");
    return {desc, std::move(c)};
}

AlgebraElement algebra_zero(const DescriptorPtr& desc) {
    return {desc, Eigen::VectorXd::Zero(desc->dim())};
}

GroupElement group_identity(const DescriptorPtr& desc) {
    return {desc, Mat::Identity(desc->matrix_size, desc->matrix_size)};
}

GroupElement group_inverse(const GroupElement& x) {
    if (!x.m.allFinite()) throw InvalidInput("group inverse: non-finite entries");
    switch (x.desc->family) {
        case GroupFamily::Circle:
        case GroupFamily::Unitary:
        case GroupFamily::SpecialUnitary:
        case GroupFamily::SpecialOrthogonal:
            return {x.desc, x.m.adjoint()};
        default: {
            const int d = x.size();
            if (d == 1) {
                if (x.m(0, 0) == Cplx(0.0, 0.0))
                    throw InvalidInput("group inverse: singular matrix");
                Mat inv(1, 1);
                inv(0, 0) = 1.0 / x.m(0, 0);
                return {x.desc, std::move(inv)};
            }
            if (d == 2) {
                Cplx det = x.m(0, 0) * x.m(1, 1) - x.m(0, 1) * x.m(1, 0);
                if (det == Cplx(0.0, 0.0))
                    throw InvalidInput("group inverse: singular matrix");
                Mat inv(2, 2);
                inv << x.m(1, 1), -x.m(0, 1), -x.m(1, 0), x.m(0, 0);
                inv /= det;
                if (!inv.allFinite()) throw InvalidInput("group inverse: singular matrix");
                return {x.desc, std::move(inv)};
            }
            Eigen::PartialPivLU<Mat> lu(x.m);
            Mat inv = lu.solve(Mat::Identity(d, d));
            if (!inv.allFinite()) throw InvalidInput("group inverse: singular matrix");
            return {x.desc, std::move(inv)};
        }
    }
}

GroupElement group_mul(const GroupElement& x, const GroupElement& y) {
    return {x.desc, x.m * y.m};
}

}  // namespace liesync
