// Weighted Poisson operator: structure, solver contract, Green benchmarks.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lakevortex/elliptic.hpp"
#include "lakevortex/errors.hpp"
#include "lakevortex/lake.hpp"

using namespace lakevortex;

namespace {

LakeSpec flat_disc_spec(int resolution = 64, double radius = 1.0) {
    LakeSpec spec;
    spec.shape.kind = Shape::Kind::Disc;
    spec.shape.radius = radius;
    spec.depth.c = ScalarExpr::constant(1.0);
    spec.resolution = resolution;
    return spec;
}

LakeSpec radial_spec(int resolution) {
    LakeSpec spec = flat_disc_spec(resolution, 2.0);
    spec.depth.c = ScalarExpr::radial(1.0, 0.5);
    return spec;
}

// Deterministic full-rank test vector on the compact cells.
std::vector<double> wiggle(const Lake& lake, double phase) {
    std::vector<double> v(lake.n_cells());
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int f = lake.cell_of[k];
        const Vec2 x = lake.cell_center(f % lake.nx, f / lake.nx);
        v[k] = std::sin(7.0 * x.x + phase) * std::cos(5.0 * x.y - phase) + 0.1;
    }
    return v;
}

double max_abs_interior(const Lake& lake, const std::vector<double>& grid_a,
                        const std::vector<double>& grid_b) {
    double m = 0.0;
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int f = lake.cell_of[k];
        m = std::max(m, std::abs(grid_a[f] - grid_b[f]));
    }
    return m;
}

}  // namespace

TEST_CASE("operator is symmetric and negative definite") {
    const Lake lake = build_lake(flat_disc_spec(32));
    const WeightedOperator op = assemble(lake);

    const std::vector<double> x = wiggle(lake, 0.0);
    const std::vector<double> y = wiggle(lake, 1.3);
    std::vector<double> ax(x.size()), ay(y.size());
    op.apply(x, ax);
    op.apply(y, ay);

    double xay = 0.0, yax = 0.0, xax = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        xay += x[k] * ay[k];
        yax += y[k] * ax[k];
        xax += x[k] * ax[k];
    }
    CHECK(std::abs(xay - yax) < 1e-10 * std::abs(xay));
    CHECK(xax < 0.0);
}

TEST_CASE("zero source gives the zero stream on both backends") {
    const Lake lake = build_lake(flat_disc_spec(32));
    const WeightedOperator op = assemble(lake);
    const std::vector<double> rhs(lake.nx * lake.ny, 0.0);
    for (const SolverBackend backend : {SolverBackend::PCG, SolverBackend::Direct}) {
        SolverOptions opts;
        opts.backend = backend;
        const StreamField psi = solve_stream(op, rhs, opts);
        for (double v : psi.values) CHECK(v == 0.0);
    }
}

TEST_CASE("solves are linear and meet the residual contract") {
    const Lake lake = build_lake(flat_disc_spec(48));
    const WeightedOperator op = assemble(lake);

    std::vector<double> rhs1(lake.nx * lake.ny, 0.0), rhs2 = rhs1, combo = rhs1;
    const std::vector<double> c1 = wiggle(lake, 0.2), c2 = wiggle(lake, 2.1);
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int f = lake.cell_of[k];
        rhs1[f] = c1[k];
        rhs2[f] = c2[k];
        combo[f] = 2.0 * c1[k] - 0.5 * c2[k];
    }

    const StreamField p1 = solve_stream(op, rhs1);
    const StreamField p2 = solve_stream(op, rhs2);
    const StreamField pc = solve_stream(op, combo);
    CHECK(residual_norm(op, p1, rhs1) <= 1e-10);
    CHECK(residual_norm(op, pc, combo) <= 1e-10);

    double scale = 0.0, err = 0.0;
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int f = lake.cell_of[k];
        const double lin = 2.0 * p1.values[f] - 0.5 * p2.values[f];
        scale = std::max(scale, std::abs(lin));
        err = std::max(err, std::abs(pc.values[f] - lin));
    }
    CHECK(err < 1e-7 * scale);
}

TEST_CASE("direct backend reproduces the PCG solution") {
    const Lake lake = build_lake(radial_spec(48));
    const WeightedOperator op = assemble(lake);
    std::vector<double> rhs(lake.nx * lake.ny, 0.0);
    const std::vector<double> c = wiggle(lake, 0.7);
    for (int k = 0; k < lake.n_cells(); ++k) rhs[lake.cell_of[k]] = c[k];

    SolverOptions pcg, direct;
    direct.backend = SolverBackend::Direct;
    const StreamField a = solve_stream(op, rhs, pcg);
    const StreamField b = solve_stream(op, rhs, direct);
    CHECK(residual_norm(op, b, rhs) <= 1e-10);

    double scale = 0.0;
    for (double v : a.values) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_interior(lake, a.values, b.values) < 1e-7 * scale);
    CHECK(b.info.backend.find("direct") != std::string::npos);
}

TEST_CASE("starved iteration budget raises a solver error") {
    const Lake lake = build_lake(flat_disc_spec(48));
    const WeightedOperator op = assemble(lake);
    std::vector<double> rhs(lake.nx * lake.ny, 0.0);
    const std::vector<double> c = wiggle(lake, 0.4);
    for (int k = 0; k < lake.n_cells(); ++k) rhs[lake.cell_of[k]] = c[k];

    SolverOptions opts;
    opts.max_iter_factor = 1;  // ~sqrt(n) iterations: far too few for 1e-10
    CHECK_THROWS_AS(solve_stream(op, rhs, opts), SolverError);
}

TEST_CASE("discrete energy is the quadratic form of the negated operator") {
    const Lake lake = build_lake(flat_disc_spec(32));
    const WeightedOperator op = assemble(lake);
    std::vector<double> rhs(lake.nx * lake.ny, 0.0);
    const std::vector<double> c = wiggle(lake, 1.9);
    for (int k = 0; k < lake.n_cells(); ++k) rhs[lake.cell_of[k]] = c[k];
    const StreamField psi = solve_stream(op, rhs);

    const double e = stream_energy(op, psi, rhs);
    CHECK(e > 0.0);

    // - sum psi rhs h^2 == <psi, -A psi> h^2 when rhs = A psi
    const std::vector<double> pc = op.to_compact(psi.values);
    std::vector<double> apc(pc.size());
    op.apply(pc, apc);
    double quad = 0.0;
    for (std::size_t k = 0; k < pc.size(); ++k) quad -= pc[k] * apc[k];
    quad *= lake.h * lake.h;
    CHECK(e == doctest::Approx(quad).epsilon(1e-6));
}

TEST_CASE("manufactured solution converges at second order (flat disc)") {
    // psi = (1 - r^2)^2 (1 + x/2) vanishes quadratically at the shore, so the
    // staircase Dirichlet data costs O(h^2) and the scheme shows its interior
    // order. rhs = lap(psi) = (16 r^2 - 8)(1 + x/2) - 4x(1 - r^2).
    double sup[2];
    const int res[2] = {32, 64};
    for (int level = 0; level < 2; ++level) {
        const Lake lake = build_lake(flat_disc_spec(res[level]));
        const WeightedOperator op = assemble(lake);
        std::vector<double> rhs(lake.nx * lake.ny, 0.0), exact = rhs;
        for (int k = 0; k < lake.n_cells(); ++k) {
            const int f = lake.cell_of[k];
            const Vec2 x = lake.cell_center(f % lake.nx, f / lake.nx);
            const double r2 = norm2(x);
            rhs[f] = (16.0 * r2 - 8.0) * (1.0 + 0.5 * x.x) - 4.0 * x.x * (1.0 - r2);
            exact[f] = (1.0 - r2) * (1.0 - r2) * (1.0 + 0.5 * x.x);
        }
        const StreamField psi = solve_stream(op, rhs);
        sup[level] = max_abs_interior(lake, psi.values, exact);
    }
    const double order = std::log2(sup[0] / sup[1]);
    CHECK(order > 1.7);
    CHECK(sup[1] < 2e-3);
}

TEST_CASE("manufactured solution converges at second order (variable depth)") {
    // Radius-2 disc, b = 1 + r^2/2, psi = (1 - r^2/4)^2:
    // div((1/b) grad psi) = -2 (1 - s/4)/(1 + s/2) + (3/2) s / (1 + s/2)^2,
    // s = r^2 (gradient of psi is -(1 - s/4) x, then the product rule).
    double sup[2];
    const int res[2] = {16, 32};
    for (int level = 0; level < 2; ++level) {
        const Lake lake = build_lake(radial_spec(res[level]));
        const WeightedOperator op = assemble(lake);
        std::vector<double> rhs(lake.nx * lake.ny, 0.0), exact = rhs;
        for (int k = 0; k < lake.n_cells(); ++k) {
            const int f = lake.cell_of[k];
            const Vec2 x = lake.cell_center(f % lake.nx, f / lake.nx);
            const double s = norm2(x);
            const double q = 1.0 + 0.5 * s;
            rhs[f] = -2.0 * (1.0 - 0.25 * s) / q + 1.5 * s / (q * q);
            exact[f] = (1.0 - 0.25 * s) * (1.0 - 0.25 * s);
        }
        const StreamField psi = solve_stream(op, rhs);
        sup[level] = max_abs_interior(lake, psi.values, exact);
    }
    const double order = std::log2(sup[0] / sup[1]);
    CHECK(order > 1.7);
}

TEST_CASE("linearly vanishing solutions only see first-order boundary data") {
    // psi = 1 - r^2 (rhs = -4) vanishes linearly at the analytic circle, so
    // the ghost-center zero sits O(h) off the true zero set and the discrete
    // maximum principle turns that into an O(h) sup error. Documented
    // staircase behavior, not a solver defect: compare the quadratic cases.
    double sup[2];
    const int res[2] = {32, 64};
    for (int level = 0; level < 2; ++level) {
        const Lake lake = build_lake(flat_disc_spec(res[level]));
        const WeightedOperator op = assemble(lake);
        std::vector<double> rhs(lake.nx * lake.ny, 0.0), exact = rhs;
        for (int k = 0; k < lake.n_cells(); ++k) {
            const int f = lake.cell_of[k];
            rhs[f] = -4.0;
            exact[f] = 1.0 - norm2(lake.cell_center(f % lake.nx, f / lake.nx));
        }
        const StreamField psi = solve_stream(op, rhs);
        sup[level] = max_abs_interior(lake, psi.values, exact);
    }
    const double order = std::log2(sup[0] / sup[1]);
    CHECK(order > 0.6);
    CHECK(order < 1.6);
}

TEST_CASE("flat-disc Green kernel matches the method of images") {
    // Unit disc, b == 1: G(x,y) = (1/2pi) ln( |x-y| / (|y| |x - y/|y|^2|) ),
    // the classical image formula. The comparison lives on the offset region
    // dist_boundary >= 0.2 minus B(y, 0.2): G vanishes at the shore, so a
    // relative error is only meaningful away from its zero set. The delta is
    // snapped to a cell center, so the formula gets the snapped source.
    const Lake lake = build_lake(flat_disc_spec(64));
    const WeightedOperator op = assemble(lake);
    for (const Vec2 y_req : {Vec2{0.3, 0.2}, Vec2{-0.25, 0.35}}) {
        int si = 0, sj = 0;
        REQUIRE(lake.locate(y_req, si, sj));
        const Vec2 y = lake.cell_center(si, sj);
        const StreamField g = green_kernel(op, y_req);

        const Vec2 image = y / norm2(y);
        const double ny = norm(y);
        double rel = 0.0;
        for (int k = 0; k < lake.n_cells(); ++k) {
            const int f = lake.cell_of[k];
            const Vec2 x = lake.cell_center(f % lake.nx, f / lake.nx);
            if (norm(x - y) < 0.2 || dist_boundary(lake, x) < 0.2) continue;
            const double exact =
                (std::log(norm(x - y)) - std::log(ny * norm(x - image))) / (2.0 * M_PI);
            rel = std::max(rel, std::abs(g.values[f] - exact) / std::abs(exact));
        }
        // staircase boundary displacement costs O(h) near the offset rim:
        // measured 3.6% at this resolution, halving at the reference grid
        CHECK(rel < 0.05);
    }
}

TEST_CASE("green kernel rejects sources at or near the shore") {
    const Lake lake = build_lake(flat_disc_spec(32));
    const WeightedOperator op = assemble(lake);
    CHECK_THROWS_AS(green_kernel(op, {1.5, 0.0}), GuardError);
    CHECK_THROWS_AS(green_kernel(op, {0.999, 0.0}), GuardError);
}

TEST_CASE("remainder kernel is the smooth part of the Green function") {
    // For the flat unit disc the remainder is exactly
    // R(x,y) = -(1/2pi) ln( |y| |x - y/|y|^2| ): bounded through the source.
    const Lake lake = build_lake(flat_disc_spec(64));
    const WeightedOperator op = assemble(lake);
    int si0 = 0, sj0 = 0;
    REQUIRE(lake.locate({0.3, 0.2}, si0, sj0));
    const Vec2 y = lake.cell_center(si0, sj0);  // snapped source
    const StreamField g = green_kernel(op, y);
    const RemainderField rem = remainder_kernel(op, g, y);

    REQUIRE(rem.singular_cell >= 0);
    const Vec2 image = y / norm2(y);
    const double ny = norm(y);
    double worst = 0.0;
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int f = lake.cell_of[k];
        const Vec2 x = lake.cell_center(f % lake.nx, f / lake.nx);
        if (dist_boundary(lake, x) < 0.2) continue;  // log blows up on the shore
        if (norm(x - y) < 4.0 * lake.h) continue;    // near-source lattice corrections
        const double exact = -std::log(ny * norm(x - image)) / (2.0 * M_PI);
        worst = std::max(worst, std::abs(rem.values[f] - exact));
    }
    CHECK(worst < 0.02);

    // smooth through the source region: on the ring 3h <= |x-y| <= 5h the
    // spread is lattice-correction sized, nothing like the ln|x-y| spike the
    // raw kernel carries across the same cells (which is ln(5/3)/2pi ~ 0.08
    // between radii alone, with a -infinity hole in the middle)
    const int si = rem.singular_cell % lake.nx, sj = rem.singular_cell / lake.nx;
    double rmin = 1e300, rmax = -1e300;
    for (int dj = -5; dj <= 5; ++dj)
        for (int di = -5; di <= 5; ++di) {
            const double r = lake.h * std::sqrt(double(di * di + dj * dj));
            if (r < 3.0 * lake.h || r > 5.0 * lake.h) continue;
            const int f = lake.flat(si + di, sj + dj);
            rmin = std::min(rmin, rem.values[f]);
            rmax = std::max(rmax, rem.values[f]);
        }
    CHECK(rmax - rmin < 0.04);
}

TEST_CASE("beach clamp floors the coefficient exactly in the shore skin") {
    LakeSpec spec = flat_disc_spec(64);
    spec.depth.phi = ScalarExpr::radial(1.0, -1.0);  // 1 - r^2
    spec.depth.alpha = 1.0;
    const Lake lake = build_lake(spec);
    const WeightedOperator op = assemble(lake);

    int clamped = 0;
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int f = lake.cell_of[k];
        CHECK(op.b_eff[k] >= lake.b[f]);
        if (op.b_eff[k] > lake.b[f]) {
            ++clamped;
            // active only where phi < h^alpha (b = c phi < c h^alpha)
            CHECK(lake.phi[f] < lake.h);
        } else {
            CHECK(lake.phi[f] >= lake.h * (1.0 - 1e-12));
        }
    }
    CHECK(clamped > 0);

    // no clamping on a non-degenerate lake
    const Lake flat = build_lake(flat_disc_spec(32));
    const WeightedOperator fop = assemble(flat);
    for (int k = 0; k < flat.n_cells(); ++k) CHECK(fop.b_eff[k] == flat.b[flat.cell_of[k]]);
}
