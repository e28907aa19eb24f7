#include "lakevortex/lake.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "lakevortex/errors.hpp"

namespace lakevortex {

ScalarExpr Shape::default_phi() const {
    if (kind == Kind::Disc) {
        // (R^2 - |x-c|^2) / (2R): positive inside, |grad| = 1 on the shore.
        return ScalarExpr::radial(radius / 2.0, -1.0 / (2.0 * radius), 0.0, center);
    }
    return ScalarExpr::box(x0, y0, x1, y1);
}

bool Lake::locate(Vec2 x, int& i, int& j) const {
    i = static_cast<int>(std::floor((x.x - origin.x) / h));
    j = static_cast<int>(std::floor((x.y - origin.y) / h));
    return i >= 0 && i < nx && j >= 0 && j < ny;
}

namespace {

struct BBox {
    double x0, y0, x1, y1;
};

BBox shape_bbox(const Shape& s) {
    if (s.kind == Shape::Kind::Disc)
        return {s.center.x - s.radius, s.center.y - s.radius,
                s.center.x + s.radius, s.center.y + s.radius};
    return {s.x0, s.y0, s.x1, s.y1};
}

}  // namespace

Lake build_lake(const LakeSpec& spec) {
    if (spec.depth.alpha < 0.0)
        throw ConfigError("depth exponent alpha must be >= 0");
    if (spec.resolution <= 0)
        throw ConfigError("resolution must be positive");
    if (spec.shape.kind == Shape::Kind::Disc && spec.shape.radius <= 0.0)
        throw ConfigError("disc radius must be positive");
    if (spec.shape.kind == Shape::Kind::Rectangle &&
        (spec.shape.x1 <= spec.shape.x0 || spec.shape.y1 <= spec.shape.y0))
        throw ConfigError("rectangle corners must be ordered");

    const BBox bb = shape_bbox(spec.shape);
    const double h = 1.0 / spec.resolution;
    if (std::min(bb.x1 - bb.x0, bb.y1 - bb.y0) < 16.0 * h)
        throw ConfigError("resolution too coarse: fewer than 16 cells across the lake");

    Lake lake;
    lake.form = spec.depth;
    if (lake.form.phi.kind == ScalarExpr::Kind::Constant && lake.form.phi.a0 == 1.0 &&
        lake.form.alpha == 0.0) {
        // Config left the topography implicit; take the shape's canonical one.
        lake.form.phi = spec.shape.default_phi();
    }
    lake.shape = spec.shape;
    lake.resolution = spec.resolution;
    lake.h = h;
    // Two ghost rings so 5-point stencils and bilinear stencils of any
    // interior cell stay on the grid. Faces land on multiples of h relative
    // to the bounding box corner, so box corners and symmetry axes of the
    // test lakes are cell corners.
    lake.nx = static_cast<int>(std::lround((bb.x1 - bb.x0) / h)) + 4;
    lake.ny = static_cast<int>(std::lround((bb.y1 - bb.y0) / h)) + 4;
    lake.origin = {bb.x0 - 2.0 * h, bb.y0 - 2.0 * h};

    const int n = lake.nx * lake.ny;
    lake.interior.assign(n, 0);
    lake.b.assign(n, 0.0);
    lake.phi.assign(n, 0.0);
    lake.grad_b.assign(n, Vec2{0.0, 0.0});
    lake.compact.assign(n, -1);

    double bmin = std::numeric_limits<double>::infinity();
    double bmax = -bmin;
    double gbmax = 0.0, gpmax = 0.0;
    for (int j = 0; j < lake.ny; ++j) {
        for (int i = 0; i < lake.nx; ++i) {
            const Vec2 c = lake.cell_center(i, j);
            const double ph = lake.form.phi.eval(c);
            const int id = lake.flat(i, j);
            lake.phi[id] = ph;
            if (ph <= 0.0) continue;
            const double cv = lake.form.c.eval(c);
            if (cv <= 0.0)
                throw ConfigError("depth factor c must be strictly positive inside the lake");
            lake.interior[id] = 1;
            lake.b[id] = lake.form.depth(c);
            lake.grad_b[id] = lake.form.grad_depth(c);
            lake.compact[id] = static_cast<int>(lake.cell_of.size());
            lake.cell_of.push_back(id);
            bmin = std::min(bmin, lake.b[id]);
            bmax = std::max(bmax, lake.b[id]);
            gbmax = std::max(gbmax, norm(lake.grad_b[id]));
            gpmax = std::max(gpmax, norm(lake.form.phi.grad(c)));
        }
    }
    if (lake.cell_of.empty())
        throw ConfigError("lake topography is nonpositive on every cell center");
    lake.b_min = bmin;
    lake.b_max = bmax;
    lake.grad_b_max = gbmax;
    lake.grad_phi_max = gpmax;

    // Staircase boundary: faces between interior and exterior cells.
    for (int j = 0; j < lake.ny; ++j) {
        for (int i = 0; i < lake.nx; ++i) {
            if (!lake.interior[lake.flat(i, j)]) continue;
            const Vec2 c = lake.cell_center(i, j);
            const double hh = 0.5 * h;
            if (!lake.is_interior(i - 1, j)) {
                lake.faces_mid.push_back({c.x - hh, c.y});
                lake.faces_tan.push_back({0.0, hh});
            }
            if (!lake.is_interior(i + 1, j)) {
                lake.faces_mid.push_back({c.x + hh, c.y});
                lake.faces_tan.push_back({0.0, hh});
            }
            if (!lake.is_interior(i, j - 1)) {
                lake.faces_mid.push_back({c.x, c.y - hh});
                lake.faces_tan.push_back({hh, 0.0});
            }
            if (!lake.is_interior(i, j + 1)) {
                lake.faces_mid.push_back({c.x, c.y + hh});
                lake.faces_tan.push_back({hh, 0.0});
            }
        }
    }
    return lake;
}

namespace {

/// Shared stencil walk for the two bilinear accessors. Returns the four
/// stencil cells around x (cell centers bracketing it) and the fractional
/// offsets; `all_interior` says whether plain bilinear applies.
struct BilinearStencil {
    int i0, j0;
    double fx, fy;
    bool all_interior;
};

BilinearStencil bilinear_stencil(const Lake& lake, Vec2 x) {
    int ci, cj;
    if (!lake.locate(x, ci, cj) || !lake.interior[lake.flat(ci, cj)])
        throw GuardError("query point is not inside an interior cell");
    const double u = (x.x - lake.origin.x) / lake.h - 0.5;
    const double v = (x.y - lake.origin.y) / lake.h - 0.5;
    BilinearStencil s;
    s.i0 = static_cast<int>(std::floor(u));
    s.j0 = static_cast<int>(std::floor(v));
    s.fx = u - s.i0;
    s.fy = v - s.j0;
    s.all_interior = lake.is_interior(s.i0, s.j0) && lake.is_interior(s.i0 + 1, s.j0) &&
                     lake.is_interior(s.i0, s.j0 + 1) && lake.is_interior(s.i0 + 1, s.j0 + 1);
    return s;
}

}  // namespace

double depth(const Lake& lake, Vec2 x) {
    const BilinearStencil s = bilinear_stencil(lake, x);
    if (s.all_interior) {
        const double b00 = lake.b[lake.flat(s.i0, s.j0)];
        const double b10 = lake.b[lake.flat(s.i0 + 1, s.j0)];
        const double b01 = lake.b[lake.flat(s.i0, s.j0 + 1)];
        const double b11 = lake.b[lake.flat(s.i0 + 1, s.j0 + 1)];
        return (1 - s.fx) * (1 - s.fy) * b00 + s.fx * (1 - s.fy) * b10 +
               (1 - s.fx) * s.fy * b01 + s.fx * s.fy * b11;
    }
    // Mask edge: extend linearly from the containing cell's center using the
    // sampled analytic gradient (exact for affine depths).
    int ci, cj;
    lake.locate(x, ci, cj);
    const int id = lake.flat(ci, cj);
    return lake.b[id] + dot(lake.grad_b[id], x - lake.cell_center(ci, cj));
}

Vec2 grad_depth(const Lake& lake, Vec2 x) {
    const BilinearStencil s = bilinear_stencil(lake, x);
    if (s.all_interior) {
        const Vec2 g00 = lake.grad_b[lake.flat(s.i0, s.j0)];
        const Vec2 g10 = lake.grad_b[lake.flat(s.i0 + 1, s.j0)];
        const Vec2 g01 = lake.grad_b[lake.flat(s.i0, s.j0 + 1)];
        const Vec2 g11 = lake.grad_b[lake.flat(s.i0 + 1, s.j0 + 1)];
        return (1 - s.fx) * (1 - s.fy) * g00 + s.fx * (1 - s.fy) * g10 +
               (1 - s.fx) * s.fy * g01 + s.fx * s.fy * g11;
    }
    int ci, cj;
    lake.locate(x, ci, cj);
    return lake.grad_b[lake.flat(ci, cj)];
}

double dist_boundary(const Lake& lake, Vec2 x) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t m = lake.faces_mid.size();
    for (std::size_t k = 0; k < m; ++k) {
        const Vec2 d = x - lake.faces_mid[k];
        const Vec2 t = lake.faces_tan[k];  // half-extent vector
        // project onto the segment mid +/- t
        const double tt = norm2(t);
        double s = tt > 0.0 ? dot(d, t) / tt : 0.0;
        s = std::clamp(s, -1.0, 1.0);
        best = std::min(best, norm2(d - s * t));
    }
    return std::sqrt(best);
}

ComponentSet level_component(const Lake& lake, Vec2 z0, double rho) {
    if (rho < 0.0) throw ConfigError("level band tolerance rho must be >= 0");
    int ci, cj;
    if (!lake.locate(z0, ci, cj) || !lake.interior[lake.flat(ci, cj)])
        throw GuardError("level component seed is not inside the lake");

    ComponentSet comp;
    comp.level = depth(lake, z0);
    comp.rho = rho;
    comp.rho_eff = std::max(rho, lake.h * lake.grad_b_max);
    comp.member.assign(lake.nx * lake.ny, 0);

    const double lo = comp.level - comp.rho_eff;
    const double hi = comp.level + comp.rho_eff;
    std::queue<std::pair<int, int>> todo;
    auto admit = [&](int i, int j) {
        if (!lake.is_interior(i, j)) return;
        const int id = lake.flat(i, j);
        if (comp.member[id]) return;
        if (lake.b[id] < lo || lake.b[id] > hi) return;
        comp.member[id] = 1;
        todo.emplace(i, j);
    };
    admit(ci, cj);
    if (todo.empty())
        throw GuardError("seed cell depth falls outside its own level band");
    while (!todo.empty()) {
        auto [i, j] = todo.front();
        todo.pop();
        const int id = lake.flat(i, j);
        comp.cells.push_back(id);
        if (!lake.is_interior(i - 1, j) || !lake.is_interior(i + 1, j) ||
            !lake.is_interior(i, j - 1) || !lake.is_interior(i, j + 1))
            comp.touches_boundary = true;
        admit(i - 1, j);
        admit(i + 1, j);
        admit(i, j - 1);
        admit(i, j + 1);
    }
    std::sort(comp.cells.begin(), comp.cells.end());
    return comp;
}

namespace {

/// Cells of a component that have a 4-neighbour outside the component; the
/// min distance between two components (or to the shore) is attained here up
/// to one cell width.
std::vector<int> component_rim(const Lake& lake, const ComponentSet& c) {
    std::vector<int> rim;
    for (int id : c.cells) {
        const int i = id % lake.nx, j = id / lake.nx;
        auto outside = [&](int a, int b2) {
            return !(a >= 0 && a < lake.nx && b2 >= 0 && b2 < lake.ny) ||
                   !c.member[lake.flat(a, b2)];
        };
        if (outside(i - 1, j) || outside(i + 1, j) || outside(i, j - 1) || outside(i, j + 1))
            rim.push_back(id);
    }
    return rim;
}

}  // namespace

SeparationConstants separation_constants(const Lake& lake, const std::vector<Vec2>& centers) {
    if (centers.empty()) throw ConfigError("separation_constants needs at least one center");

    const double rho_max = 0.5 * (lake.b_max - lake.b_min);
    const int kmax = 40;
    for (int k = 0; k <= kmax; ++k) {
        const double rho = (k == kmax) ? 0.0 : rho_max / static_cast<double>(1 << std::min(k, 30));
        std::vector<ComponentSet> comps;
        comps.reserve(centers.size());
        for (const Vec2& z : centers) comps.push_back(level_component(lake, z, rho));

        bool touches = false;
        for (const auto& c : comps) touches |= c.touches_boundary;
        bool overlap = false;
        for (std::size_t a = 0; a + 1 < comps.size() && !overlap; ++a)
            for (std::size_t b2 = a + 1; b2 < comps.size() && !overlap; ++b2)
                for (int id : comps[a].cells)
                    if (comps[b2].member[id]) {
                        overlap = true;
                        break;
                    }

        if (!touches && !overlap) {
            SeparationConstants sc;
            sc.rho_b = rho;
            sc.components = std::move(comps);
            // r0: min over components of (shore distance, min pairwise
            // distance), both over cell centers of the component rims.
            double r0 = std::numeric_limits<double>::infinity();
            std::vector<std::vector<int>> rims;
            for (const auto& c : sc.components) rims.push_back(component_rim(lake, c));
            for (std::size_t a = 0; a < rims.size(); ++a) {
                for (int id : rims[a]) {
                    const Vec2 p = lake.cell_center(id % lake.nx, id / lake.nx);
                    r0 = std::min(r0, dist_boundary(lake, p));
                }
                for (std::size_t b2 = 0; b2 < rims.size(); ++b2) {
                    if (a == b2) continue;
                    for (int ia : rims[a]) {
                        const Vec2 pa = lake.cell_center(ia % lake.nx, ia / lake.nx);
                        for (int ib : rims[b2]) {
                            const Vec2 pb = lake.cell_center(ib % lake.nx, ib / lake.nx);
                            r0 = std::min(r0, norm(pa - pb));
                        }
                    }
                }
            }
            sc.r0 = r0;
            return sc;
        }

        if (k == kmax) {
            if (overlap)
                throw SeparationError(SeparationError::Kind::Overlap,
                                      "vortex level components overlap even at rho -> 0");
            throw SeparationError(SeparationError::Kind::BoundaryContact,
                                  "level component touches the shore at every tolerance");
        }
    }
    throw SeparationError(SeparationError::Kind::BoundaryContact, "unreachable");
}

}  // namespace lakevortex
