#pragma once

#include <array>
#include <cstddef>
#include <limits>

#include "hslab/grid.hpp"

namespace hslab {

// Sets are unions of cells and every distance is measured between cell centers.

/// member(k) <=> f[k] > threshold; threshold must be nonnegative.
RegionMask positivity_set(const ScalarField& f, double threshold);

/// Symmetric Hausdorff distance; +infinity if exactly one set is empty, 0 if both are.
double hausdorff_distance(const RegionMask& A, const RegionMask& B);

/// max over A of the distance to the nearest member of B.
double directed_distance(const RegionMask& A, const RegionMask& B);

/// Cells whose center lies within delta (inclusive) of a center of A.
RegionMask neighborhood(const RegionMask& A, double delta);

/// Width of the center projection, minimized over `angles` directions in [0, π), plus h. Empty set: 0.
double minimal_diameter(const RegionMask& A, std::size_t angles = 360);

/// Largest center-to-center distance plus h. Empty set: 0.
double diameter(const RegionMask& A);

/// Cells whose center lies within r of the center of `cell`; throws if that ball leaves the box or r < 3h.
RegionMask ball_mask(const Grid& g, std::size_t cell, double r);

/// MD({p <= threshold} ∩ B_r(x)) / r.
double flatness_ratio(const ScalarField& p, std::size_t cell, double r, double threshold);

/// |{p <= threshold} ∩ B_r(x)| / |B_r(x)| by cell counts.
double lebesgue_density(const ScalarField& p, std::size_t cell, double r, double threshold);

struct RadialBounds {
    double R_minus = 0.0;
    double R_plus = 0.0;
};

/**
 * R_plus: largest center distance to a member plus h/2. R_minus: distance to
 * the nearest non-member center (or to the box edge) minus h/2, and 0 when a
 * cell touching `center` is not a member.
 */
RadialBounds radial_bounds(const RegionMask& A, const std::array<double, 2>& center);

/// Number of edge-connected components.
std::size_t component_count(const RegionMask& A);

/// Cells of A with at least one edge neighbor outside A (the box exterior counts as outside).
RegionMask boundary_cells(const RegionMask& A);

} // namespace hslab
