#pragma once

#include <cstdint>
#include <optional>

#include "liesync/descriptor.hpp"

namespace liesync {

/// A concrete group instantiation: descriptor plus facts established for the
/// family at this size.
struct GroupCatalogEntry {
    DescriptorPtr desc;
    /// Whether X - X^{-1} lands in the algebra for sampled group elements
    /// (the condition under which the plain matrix interaction keeps
    /// trajectories on the group). Established numerically at construction.
    bool closure_flag = false;
};

/// Builds the catalog entry for a family and matrix size. Basis dimensions:
/// u(d): d^2, su(d): d^2-1, gl_n(C): 2n^2, sl_n(C): 2(n^2-1),
/// so(d): d(d-1)/2, circle: 1. Throws ConfigError for unsupported
/// combinations.
GroupCatalogEntry make_group(GroupFamily family, int d);
GroupCatalogEntry make_group(const std::string& id, int d);

/// exp(v) with v drawn uniformly from the radius-ball in descriptor
/// coordinates; fully determined by the seed.
GroupElement random_near_identity(const GroupCatalogEntry& entry, double radius,
                                  std::uint64_t seed);

/// Uniform draw from the ball in the algebra, deterministic in the seed.
AlgebraElement random_algebra_element(const GroupCatalogEntry& entry, double radius,
                                      std::uint64_t seed);

/// Family-specific membership residual: ||X^H X - I|| for the unitary
/// families (plus |det - 1| for the special ones), |det - 1| for SL,
/// realness/orthogonality/det for SO, and a condition-number overflow for
/// GL. Zero for exact members.
double validate_membership(const GroupElement& x);

/// Round-trip, basis-orthonormality and bracket-closure checks; shrinks the
/// chart radius by 0.8 and retries when log(exp(v)) = v fails for sampled
/// |v| <= r/2. Returns the validated entry. Throws on structural failure.
GroupCatalogEntry validate_catalog_entry(GroupCatalogEntry entry);

}  // namespace liesync
