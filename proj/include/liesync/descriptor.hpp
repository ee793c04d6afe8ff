#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liesync/matrix_functions.hpp"

namespace liesync {

enum class GroupFamily {
    Circle,
    Unitary,
    SpecialUnitary,
    GeneralLinearComplex,
    SpecialLinear,
    SpecialOrthogonal,
};

/// Stable string ids used in scenario files: "circle", "u", "su", "gl_c",
/// "sl_c", "so".
std::string family_id(GroupFamily family);
GroupFamily family_from_id(const std::string& id);

/// Everything needed to compute in one matrix Lie group: the family tag, the
/// matrix size d, an algebra basis orthonormal with respect to Re tr(A^H B),
/// the inner-product form on coefficient vectors, and the radius of the ball
/// on which exp is treated as a chart.
///
/// The basis is the source of truth for algebra elements: an element is its
/// real coefficient vector, so membership in the span is exact and the
/// structure constants (ad matrices of the basis) close the bracket without
/// round-trips through d x d matrices.
struct GroupDescriptor {
    GroupFamily family;
    int matrix_size = 0;
    std::vector<Mat> basis;
    Eigen::MatrixXd inner_product;  // SPD form on coefficients; identity by default
    double chart_radius = 0.0;
    std::vector<Eigen::MatrixXd> ad_basis;  // ad matrices of the basis elements

    int dim() const { return static_cast<int>(basis.size()); }

    /// Coefficients of the orthogonal projection of m onto span(basis);
    /// optionally reports the Frobenius norm of the part left outside.
    Eigen::VectorXd project(const Mat& m, double* residual = nullptr) const;

    Mat materialize(const Eigen::VectorXd& coords) const;

    /// Norm sqrt(c^T inner_product c) of a coefficient vector.
    double coord_norm(const Eigen::VectorXd& coords) const;
};

using DescriptorPtr = std::shared_ptr<const GroupDescriptor>;

/// Element of the Lie algebra, stored as coefficients in the descriptor
/// basis. Immutable in spirit: operations return new values.
struct AlgebraElement {
    DescriptorPtr desc;
    Eigen::VectorXd coords;

    AlgebraElement() = default;
    AlgebraElement(DescriptorPtr d, Eigen::VectorXd c)
        : desc(std::move(d)), coords(std::move(c)) {}

    /// Projects a raw matrix into the algebra. Throws InvalidInput when the
    /// projection residual exceeds 1e-10 * ||m|| (the matrix is not in the
    /// span within tolerance) or when entries are non-finite.
    static AlgebraElement from_matrix(const DescriptorPtr& desc, const Mat& m);

    Mat matrix() const { return desc->materialize(coords); }
    double norm() const { return desc->coord_norm(coords); }
    bool is_zero(double tol = 0.0) const { return coords.lpNorm<Eigen::Infinity>() <= tol; }

    AlgebraElement operator+(const AlgebraElement& o) const { return {desc, coords + o.coords}; }
    AlgebraElement operator-(const AlgebraElement& o) const { return {desc, coords - o.coords}; }
    AlgebraElement operator-() const { return {desc, -coords}; }
    AlgebraElement operator*(double s) const { return {desc, coords * s}; }
};

inline AlgebraElement operator*(double s, const AlgebraElement& v) { return v * s; }

/// Zero element of the algebra.
AlgebraElement algebra_zero(const DescriptorPtr& desc);

/// Element of the group as an invertible matrix.
struct GroupElement {
    DescriptorPtr desc;
    Mat m;

    GroupElement() = default;
    GroupElement(DescriptorPtr d, Mat matrix) : desc(std::move(d)), m(std::move(matrix)) {}

    int size() const { return static_cast<int>(m.rows()); }
};

/// Identity element.
GroupElement group_identity(const DescriptorPtr& desc);

/// Family-aware inverse: conjugate transpose for the orthogonal/unitary
/// families, LU inverse otherwise. Throws InvalidInput on singular input.
GroupElement group_inverse(const GroupElement& x);

/// x * y.
GroupElement group_mul(const GroupElement& x, const GroupElement& y);

}  // namespace liesync
