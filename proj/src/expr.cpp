#include "lakevortex/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lakevortex {

double ScalarExpr::eval(Vec2 p) const {
    switch (kind) {
        case Kind::Constant:
            return a0;
        case Kind::Affine:
            return a0 + ax * p.x + ay * p.y;
        case Kind::Radial: {
            const double r2 = norm2(p - center);
            return p0 + p2 * r2 + p4 * r2 * r2;
        }
        case Kind::Box:
            return std::min(std::min(p.x - x0, x1 - p.x), std::min(p.y - y0, y1 - p.y));
    }
    return 0.0;
}

Vec2 ScalarExpr::grad(Vec2 p) const {
    switch (kind) {
        case Kind::Constant:
            return {0.0, 0.0};
        case Kind::Affine:
            return {ax, ay};
        case Kind::Radial: {
            const Vec2 d = p - center;
            const double r2 = norm2(d);
            return (2.0 * p2 + 4.0 * p4 * r2) * d;
        }
        case Kind::Box: {
            const double e[4] = {p.x - x0, x1 - p.x, p.y - y0, y1 - p.y};
            int arg = 0;
            for (int i = 1; i < 4; ++i)
                if (e[i] < e[arg]) arg = i;
            switch (arg) {
                case 0: return {1.0, 0.0};
                case 1: return {-1.0, 0.0};
                case 2: return {0.0, 1.0};
                default: return {0.0, -1.0};
            }
        }
    }
    return {0.0, 0.0};
}

std::string ScalarExpr::describe() const {
    char buf[160];
    switch (kind) {
        case Kind::Constant:
            std::snprintf(buf, sizeof buf, "constant(%g)", a0);
            break;
        case Kind::Affine:
            std::snprintf(buf, sizeof buf, "affine(%g%+g*x%+g*y)", a0, ax, ay);
            break;
        case Kind::Radial:
            std::snprintf(buf, sizeof buf, "radial(%g%+g*r2%+g*r2^2 about (%g,%g))",
                          p0, p2, p4, center.x, center.y);
            break;
        case Kind::Box:
            std::snprintf(buf, sizeof buf, "box(%g,%g,%g,%g)", x0, y0, x1, y1);
            break;
    }
    return buf;
}

ScalarExpr ScalarExpr::constant(double v) {
    ScalarExpr e;
    e.kind = Kind::Constant;
    e.a0 = v;
    return e;
}

ScalarExpr ScalarExpr::affine(double a0, double ax, double ay) {
    ScalarExpr e;
    e.kind = Kind::Affine;
    e.a0 = a0;
    e.ax = ax;
    e.ay = ay;
    return e;
}

ScalarExpr ScalarExpr::radial(double p0, double p2, double p4, Vec2 center) {
    ScalarExpr e;
    e.kind = Kind::Radial;
    e.p0 = p0;
    e.p2 = p2;
    e.p4 = p4;
    e.center = center;
    return e;
}

ScalarExpr ScalarExpr::box(double x0, double y0, double x1, double y1) {
    ScalarExpr e;
    e.kind = Kind::Box;
    e.x0 = x0;
    e.y0 = y0;
    e.x1 = x1;
    e.y1 = y1;
    return e;
}

double DepthForm::depth(Vec2 p) const {
    const double cv = c.eval(p);
    if (alpha == 0.0) return cv;
    const double ph = phi.eval(p);
    return cv * std::pow(ph, alpha);
}

Vec2 DepthForm::grad_depth(Vec2 p) const {
    if (alpha == 0.0) return c.grad(p);
    const double cv = c.eval(p);
    const double ph = phi.eval(p);
    // d(c phi^a) = (dc) phi^a + c a phi^(a-1) (dphi)
    const double pa = std::pow(ph, alpha);
    return pa * c.grad(p) + (cv * alpha * std::pow(ph, alpha - 1.0)) * phi.grad(p);
}

}  // namespace lakevortex
