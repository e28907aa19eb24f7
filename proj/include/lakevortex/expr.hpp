#pragma once

#include <string>

#include "lakevortex/vec2.hpp"

namespace lakevortex {

/// Closed-form scalar field on the plane. This is the small analytic catalog
/// the config format accepts for depth factors and topographies:
///   constant    a0
///   affine      a0 + ax*x + ay*y
///   radial      p0 + p2*r2 + p4*r2^2          with r2 = |p - center|^2
///   box         min(x-x0, x1-x, y-y0, y1-y)   (distance-like, rectangle)
/// All four have cheap exact gradients, which the limit dynamics and the
/// depth samples on the grid both rely on.
struct ScalarExpr {
    enum class Kind { Constant, Affine, Radial, Box };
    Kind kind = Kind::Constant;

    // affine coefficients (Constant uses a0 only)
    double a0 = 0.0, ax = 0.0, ay = 0.0;
    // radial polynomial in r^2 about `center`
    double p0 = 0.0, p2 = 0.0, p4 = 0.0;
    Vec2 center{0.0, 0.0};
    // box corners
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double eval(Vec2 p) const;
    /// Gradient; for Box the minimizing edge decides (ties broken in the
    /// fixed order left, right, bottom, top so evaluation is deterministic).
    Vec2 grad(Vec2 p) const;

    std::string describe() const;

    static ScalarExpr constant(double v);
    static ScalarExpr affine(double a0, double ax, double ay);
    static ScalarExpr radial(double p0, double p2, double p4 = 0.0, Vec2 center = {0.0, 0.0});
    static ScalarExpr box(double x0, double y0, double x1, double y1);
};

/// Depth law b(x) = c(x) * phi(x)^alpha. `phi` is the lake topography
/// (positive inside, nonpositive outside); alpha = 0 means a non-degenerate
/// shore, alpha > 0 a beach where b vanishes like dist^alpha.
struct DepthForm {
    ScalarExpr c = ScalarExpr::constant(1.0);
    ScalarExpr phi = ScalarExpr::constant(1.0);
    double alpha = 0.0;

    double depth(Vec2 p) const;
    Vec2 grad_depth(Vec2 p) const;
};

}  // namespace lakevortex
