#pragma once

#include <cstdint>
#include <vector>

#include "lakevortex/expr.hpp"
#include "lakevortex/vec2.hpp"

namespace lakevortex {

/// Lake footprint used to size the grid and derive a default topography.
struct Shape {
    enum class Kind { Disc, Rectangle };
    Kind kind = Kind::Disc;
    Vec2 center{0.0, 0.0};
    double radius = 1.0;
    // rectangle corners
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

    /// Canonical topography: (R^2-|x-c|^2)/(2R) for discs (|grad| = 1 at the
    /// shore), edge min-distance for rectangles.
    ScalarExpr default_phi() const;
};

struct LakeSpec {
    Shape shape;
    DepthForm depth;
    int resolution = 64;  ///< grid cells per unit length
};

/// Rasterized lake: a uniform cell-centered Cartesian grid over the shape's
/// bounding box (two ghost rings), with a cell interior iff phi > 0 at its
/// center. Depth, topography and the analytic depth gradient are sampled at
/// the interior cell centers; all field solves and deposits live on this
/// grid. The staircase boundary is the set of faces between interior and
/// exterior cells.
class Lake {
public:
    Vec2 origin;  ///< lower-left corner of cell (0,0)
    double h = 0.0;
    int nx = 0, ny = 0;

    std::vector<std::uint8_t> interior;  ///< nx*ny mask
    std::vector<double> b;               ///< depth at cell centers, 0 outside
    std::vector<double> phi;             ///< topography at cell centers
    std::vector<Vec2> grad_b;            ///< analytic depth gradient samples

    std::vector<int> compact;     ///< flat cell id -> compact interior index or -1
    std::vector<int> cell_of;     ///< compact index -> flat cell id
    std::vector<Vec2> faces_mid;  ///< staircase boundary face midpoints
    std::vector<Vec2> faces_tan;  ///< half-length tangent of each face (h/2 long)

    DepthForm form;
    Shape shape;
    int resolution = 0;

    double b_min = 0.0, b_max = 0.0;   ///< over interior cells
    double grad_b_max = 0.0;           ///< max |grad b| over interior cells
    double grad_phi_max = 0.0;         ///< max |grad phi| over interior cells

    int n_cells() const { return static_cast<int>(cell_of.size()); }
    int flat(int i, int j) const { return j * nx + i; }
    bool is_interior(int i, int j) const {
        return i >= 0 && i < nx && j >= 0 && j < ny && interior[flat(i, j)];
    }
    Vec2 cell_center(int i, int j) const {
        return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h};
    }
    /// Cell containing x (no interiority check); false if off the grid.
    bool locate(Vec2 x, int& i, int& j) const;
    /// Shore guard height: particles must keep phi above this.
    double phi_floor() const { return h * grad_phi_max; }
};

Lake build_lake(const LakeSpec& spec);

/// Bilinear interpolation of the depth samples. Requires x inside an
/// interior cell; near the mask edge (fewer than 4 interior stencil cells)
/// falls back to a gradient-corrected nearest-cell extension, which keeps
/// affine depths exact.
double depth(const Lake& lake, Vec2 x);

/// Same stencil logic for the sampled analytic gradient.
Vec2 grad_depth(const Lake& lake, Vec2 x);

/// Distance from x to the staircase boundary: exact min over the
/// interior/exterior face segments, O(h)-accurate vs the analytic shore.
double dist_boundary(const Lake& lake, Vec2 x);

/// Connected level-set band: cells reachable from z0 with 4-connectivity
/// among cells satisfying |b - b(z0)| <= max(rho, h * max|grad b|).
struct ComponentSet {
    double level = 0.0;  ///< b(z0)
    double rho = 0.0;    ///< requested tolerance
    double rho_eff = 0.0;
    std::vector<int> cells;            ///< flat ids, ascending
    std::vector<std::uint8_t> member;  ///< nx*ny membership mask
    bool touches_boundary = false;

    bool contains_cell(int flat_id) const { return member[flat_id] != 0; }
};

ComponentSet level_component(const Lake& lake, Vec2 z0, double rho);

/// Dyadic search for the largest band tolerance rho_b = rho_max / 2^k whose
/// components are pairwise disjoint and boundary-disjoint, plus the
/// separation radius r0 = min over components of (distance to the shore,
/// min distance to any other component), measured between cell centers.
/// Throws SeparationError{Overlap} if components overlap even at rho -> 0,
/// SeparationError{BoundaryContact} if bands always reach the shore.
struct SeparationConstants {
    double rho_b = 0.0;
    double r0 = 0.0;
    std::vector<ComponentSet> components;  ///< at rho_b, one per center
};

SeparationConstants separation_constants(const Lake& lake, const std::vector<Vec2>& centers);

}  // namespace lakevortex
