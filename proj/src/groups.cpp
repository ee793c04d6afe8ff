#include "liesync/groups.hpp"

#include <cmath>
#include <limits>

#include "liesync/errors.hpp"
#include "liesync/lie_ops.hpp"
#include "liesync/rng.hpp"

namespace liesync {

namespace {

const Cplx kI{0.0, 1.0};

Mat unit(int d, int r, int c) {
    Mat m = Mat::Zero(d, d);
    m(r, c) = 1.0;
    return m;
}

// Off-diagonal anti-Hermitian pairs shared by u(d) and su(d):
// (E_kl - E_lk)/sqrt(2) and i(E_kl + E_lk)/sqrt(2).
void append_antihermitian_offdiag(int d, std::vector<Mat>& basis) {
    const double s = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            basis.push_back(s * (unit(d, k, l) - unit(d, l, k)));
            basis.push_back(kI * s * (unit(d, k, l) + unit(d, l, k)));
        }
    }
}

// Traceless diagonal ladder diag(1,..,1,-m,0,..)/sqrt(m(m+1)); orthonormal
// and spanning the traceless diagonals.
std::vector<Mat> traceless_diagonals(int d) {
    std::vector<Mat> out;
    for (int m = 1; m < d; ++m) {
        Mat g = Mat::Zero(d, d);
        for (int k = 0; k < m; ++k) g(k, k) = 1.0;
        g(m, m) = -static_cast<double>(m);
        out.push_back(g / std::sqrt(static_cast<double>(m) * (m + 1)));
    }
    return out;
}

std::vector<Mat> build_basis(GroupFamily family, int d) {
    std::vector<Mat> basis;
    switch (family) {
        case GroupFamily::Circle: {
            basis.push_back(kI * Mat::Identity(1, 1));
            break;
        }
        case GroupFamily::Unitary: {
            for (int k = 0; k < d; ++k) basis.push_back(kI * unit(d, k, k));
            append_antihermitian_offdiag(d, basis);
            break;
        }
        case GroupFamily::SpecialUnitary: {
            for (const Mat& g : traceless_diagonals(d)) basis.push_back(kI * g);
            append_antihermitian_offdiag(d, basis);
            break;
        }
        case GroupFamily::SpecialOrthogonal: {
            const double s = 1.0 / std::sqrt(2.0);
            for (int k = 0; k < d; ++k)
                for (int l = k + 1; l < d; ++l)
                    basis.push_back(s * (unit(d, k, l) - unit(d, l, k)));
            break;
        }
        case GroupFamily::GeneralLinearComplex: {
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    basis.push_back(unit(d, k, l));
                    basis.push_back(kI * unit(d, k, l));
                }
            break;
        }
        case GroupFamily::SpecialLinear: {
            for (const Mat& g : traceless_diagonals(d)) {
                basis.push_back(g);
                basis.push_back(kI * g);
            }
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    if (k == l) continue;
                    basis.push_back(unit(d, k, l));
                    basis.push_back(kI * unit(d, k, l));
                }
            break;
        }
    }
    return basis;
}

double default_chart_radius(GroupFamily family) {
    // Radii chosen so that log(exp(v)) = v round-trips on B_{r/2} with a
    // wide margin to the principal-branch boundary (eigenvalue angles stay
    // below pi), verified by validate_catalog_entry and the test suite.
    switch (family) {
        case GroupFamily::Circle: return 3.0;
        case GroupFamily::Unitary:
        case GroupFamily::SpecialUnitary:
        case GroupFamily::SpecialOrthogonal: return 2.0;
        case GroupFamily::GeneralLinearComplex:
        case GroupFamily::SpecialLinear: return 1.5;
    }
    return 0.5;
}

bool closure_condition_holds(const GroupCatalogEntry& entry) {
    // X - X^{-1} must project into the algebra with residual <= 1e-9 for 100
    // sampled X in exp(B_{r/2}).
    const double r = entry.desc->chart_radius / 2.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        GroupElement x = random_near_identity(entry, r, 0xC105EULL + k);
        Mat diff = x.m - group_inverse(x).m;
        double residual = 0.0;
        entry.desc->project(diff, &residual);
        if (residual > 1e-9 * std::max(1.0, diff.norm())) return false;
    }
    return true;
}

}  // namespace

GroupCatalogEntry make_group(GroupFamily family, int d) {
    if (d < 1) throw ConfigError("make_group: matrix size must be >= 1");
    if (family == GroupFamily::Circle && d != 1)
        throw ConfigError("make_group: the circle group has matrix size 1");
    if (family == GroupFamily::SpecialUnitary && d < 2)
        throw ConfigError("make_group: su(d) needs d >= 2");
    if (family == GroupFamily::SpecialLinear && d < 2)
        throw ConfigError("make_group: sl(d) needs d >= 2");
    if (family == GroupFamily::SpecialOrthogonal && d < 2)
        throw ConfigError("make_group: so(d) needs d >= 2");

    auto desc = std::make_shared<GroupDescriptor>();
    desc->family = family;
    desc->matrix_size = (family == GroupFamily::Circle) ? 1 : d;
    desc->basis = build_basis(family, desc->matrix_size);
    desc->inner_product = Eigen::MatrixXd::Identity(static_cast<int>(desc->basis.size()),
                                                    static_cast<int>(desc->basis.size()));
    desc->chart_radius = default_chart_radius(family);

    // structure constants: ad matrices of the basis elements
    const int n = desc->dim();
    desc->ad_basis.resize(n);
    for (int a = 0; a < n; ++a) {
        Eigen::MatrixXd ada(n, n);
        for (int b = 0; b < n; ++b) {
            Mat br = desc->basis[a] * desc->basis[b] - desc->basis[b] * desc->basis[a];
            ada.col(b) = desc->project(br);
        }
        desc->ad_basis[a] = std::move(ada);
    }

    GroupCatalogEntry entry{desc, false};
    entry.closure_flag = closure_condition_holds(entry);
    return entry;
}

GroupCatalogEntry make_group(const std::string& id, int d) {
    return make_group(family_from_id(id), d);
}

AlgebraElement random_algebra_element(const GroupCatalogEntry& entry, double radius,
                                      std::uint64_t seed) {
    if (!(radius > 0.0))
        throw ConfigError("random sampling: radius must be positive");
    CounterRng rng(seed);
    return {entry.desc, rng.uniform_ball(entry.desc->dim(), radius)};
}

GroupElement random_near_identity(const GroupCatalogEntry& entry, double radius,
                                  std::uint64_t seed) {
    if (!(radius > 0.0) || radius > entry.desc->chart_radius)
        throw ConfigError("random_near_identity: radius must lie in (0, chart_radius]");
    return group_exp(random_algebra_element(entry, radius, seed));
}

double validate_membership(const GroupElement& x) {
    if (!x.m.allFinite()) return std::numeric_limits<double>::infinity();
    const int d = x.size();
    const Mat id = Mat::Identity(d, d);
    switch (x.desc->family) {
        case GroupFamily::Circle:
        case GroupFamily::Unitary:
            return (x.m.adjoint() * x.m - id).norm();
        case GroupFamily::SpecialUnitary:
            return (x.m.adjoint() * x.m - id).norm() +
                   std::abs(x.m.determinant() - Cplx(1.0, 0.0));
        case GroupFamily::SpecialOrthogonal:
            return (x.m.transpose() * x.m - id).norm() +
                   std::abs(x.m.determinant() - Cplx(1.0, 0.0)) + x.m.imag().norm();
        case GroupFamily::SpecialLinear:
            return std::abs(x.m.determinant() - Cplx(1.0, 0.0));
        case GroupFamily::GeneralLinearComplex: {
            // invertibility with a condition-number ceiling
            Eigen::JacobiSVD<Mat> svd(x.m);
            double smin = svd.singularValues().minCoeff();
            double smax = svd.singularValues().maxCoeff();
            if (smin <= 0.0) return std::numeric_limits<double>::infinity();
            double cond = smax / smin;
            const double ceiling = 1e8;
            return cond <= ceiling ? 0.0 : (cond - ceiling) / ceiling;
        }
    }
    return std::numeric_limits<double>::infinity();
}

GroupCatalogEntry validate_catalog_entry(GroupCatalogEntry entry) {
    const auto& desc = *entry.desc;
    const int n = desc.dim();

    // Gram matrix of the basis must be the identity.
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double g = (desc.basis[a].adjoint() * desc.basis[b]).trace().real();
            double want = (a == b) ? 1.0 : 0.0;
            if (std::abs(g - want) > 1e-12)
                throw ConfigError("catalog entry: basis not orthonormal");
        }

    // Bracket closure.
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Mat br = desc.basis[a] * desc.basis[b] - desc.basis[b] * desc.basis[a];
            double residual = 0.0;
            desc.project(br, &residual);
            if (residual > 1e-10 * std::max(1.0, br.norm()))
                throw ConfigError("catalog entry: bracket leaves the span");
        }

    // Round-trip calibration: shrink the chart when log(exp(v)) != v.
    for (int attempt = 0; attempt < 8; ++attempt) {
        bool ok = true;
        for (std::uint64_t k = 0; k < 64 && ok; ++k) {
            AlgebraElement v =
                random_algebra_element(entry, entry.desc->chart_radius / 2.0, 0xCA1BULL + k);
            try {
                AlgebraElement w = group_log(group_exp(v));
                ok = (w - v).norm() <= 1e-10 * (1.0 + v.norm());
            } catch (const ChartViolation&) {
                ok = false;
            }
        }
        if (ok) return entry;
        auto shrunk = std::make_shared<GroupDescriptor>(*entry.desc);
        shrunk->chart_radius *= 0.8;
        entry.desc = shrunk;
    }
    throw ConfigError("catalog entry: chart calibration failed");
}

}  // namespace liesync
