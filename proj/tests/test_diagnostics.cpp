// Concentration diagnostics: moments, masses, norms, full records.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lakevortex/diagnostics.hpp"
#include "lakevortex/errors.hpp"

using namespace lakevortex;

namespace {

Lake flat_disc(int resolution = 64) {
    LakeSpec spec;
    spec.shape.kind = Shape::Kind::Disc;
    spec.shape.radius = 1.0;
    spec.depth.c = ScalarExpr::constant(1.0);
    spec.resolution = resolution;
    return build_lake(spec);
}

Lake radial_lake(int resolution = 64) {
    LakeSpec spec;
    spec.shape.kind = Shape::Kind::Disc;
    spec.shape.radius = 2.0;
    spec.depth.c = ScalarExpr::radial(1.0, 0.5);
    spec.resolution = resolution;
    return build_lake(spec);
}

Blob two_particles(Vec2 a, Vec2 b, double wa, double wb) {
    Blob blob;
    blob.pos = {a, b};
    blob.w = {wa, wb};
    blob.gamma = wa + wb;
    blob.z0 = 0.5 * (a + b);
    blob.eps = 0.05;
    return blob;
}

}  // namespace

TEST_CASE("center and inertia on a hand-built pair") {
    const Vec2 z0{0.3, -0.1};
    const double d = 0.07;
    const Blob blob = two_particles(z0 + Vec2{d, 0.0}, z0 - Vec2{d, 0.0}, 0.5, 0.5);

    const Vec2 z = center(blob);
    CHECK(norm(z - z0) < 1e-15);
    CHECK(inertia(blob, z) == doctest::Approx(d * d).epsilon(1e-14));

    // inertia about a shifted point picks up the parallel-axis term
    const Vec2 shift{0.02, 0.0};
    CHECK(inertia(blob, z - shift) ==
          doctest::Approx(d * d + norm2(shift)).epsilon(1e-12));

    Blob zero = blob;
    zero.w = {0.5, -0.5};
    zero.gamma = 0.0;
    CHECK_THROWS_AS(center(zero), ConfigError);
}

TEST_CASE("transverse moment expands into the depth moments") {
    // K = sum |w| (b - b0)^2 equals J2 - 2 b0 J1 + b0^2 gamma for a
    // single-signed blob (|w| = w), an exact algebraic identity.
    const Lake lake = radial_lake();
    const Blob blob = init_blob(lake, {1.0, 0.0}, 1.0, 0.05, 2.0, BlobProfile::Uniform);
    const double b0 = depth(lake, blob.z0);

    const double K = transverse_moment(blob, lake, b0);
    const double J1 = depth_moment(blob, lake, 1);
    const double J2 = depth_moment(blob, lake, 2);
    const double expanded = J2 - 2.0 * b0 * J1 + b0 * b0 * blob.gamma;
    CHECK(K == doctest::Approx(expanded).epsilon(1e-10));

    // J0 is the circulation itself
    CHECK(depth_moment(blob, lake, 0) == doctest::Approx(blob.gamma).epsilon(1e-15));
}

TEST_CASE("mass outside a radius obeys the Chebyshev bound") {
    const Lake lake = flat_disc();
    const Blob blob = init_blob(lake, {0.3, 0.0}, 1.0, 0.05, 2.0, BlobProfile::Uniform);
    const Vec2 z = center(blob);
    const double I = inertia(blob, z);

    for (const double R : {0.02, 0.05, 0.08, 0.15}) {
        const double out = mass_outside(blob, z, R);
        CHECK(out <= I / (R * R) + 1e-15);
        CHECK(out >= 0.0);
    }
    // everything is inside a radius that covers the support
    CHECK(mass_outside(blob, z, 0.11) == 0.0);
    // and outside radius 0 is the whole (absolute) mass
    CHECK(mass_outside(blob, z, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("log moment of a pair has the two-body closed form") {
    const Lake lake = flat_disc();
    const double r = 0.2, delta = 0.01, w1 = 0.6, w2 = 0.4;
    const Blob blob = two_particles({0.1, 0.0}, {0.3, 0.0}, w1, w2);
    // flat lake: sum_j w_j psi(x_j) = (w1^2 + w2^2) ln delta + 2 w1 w2 ln r
    const double expect = (w1 * w1 + w2 * w2) * std::log(delta) + 2.0 * w1 * w2 * std::log(r);
    CHECK(psi_self_moment(lake, blob, delta) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("transverse support radius and mass ladder are consistent") {
    const Lake lake = radial_lake();
    const Blob blob = init_blob(lake, {1.0, 0.0}, 1.0, 0.05, 2.0, BlobProfile::Uniform);
    const double b0 = depth(lake, blob.z0);

    const double h0 = 0.5;  // top rung well above the blob's depth spread
    const TransverseSupport ts = transverse_support(blob, lake, b0, h0);

    // R_t ~ |grad b| * support radius = 1 * 0.1, up to interpolation slack
    CHECK(ts.R_t > 0.05);
    CHECK(ts.R_t < 0.2);

    // rungs shrink with k, so the cumulative masses grow with k
    for (int k = 1; k < kMassLadder; ++k) CHECK(ts.m_t[k] >= ts.m_t[k - 1]);
    // top rung (0.5) exceeds R_t: nothing above it
    CHECK(ts.m_t[0] == 0.0);
    // bottom rung 0.5/2^7 ~ 0.004 < R_t: some mass above it, but never more
    // than the whole blob
    CHECK(ts.m_t[kMassLadder - 1] > 0.0);
    CHECK(ts.m_t[kMassLadder - 1] <= 1.0 + 1e-13);

    // exact rung semantics: mass with |b - b0| > h0/2^k
    double manual = 0.0;
    const double rung = h0 / 128.0;
    for (int k = 0; k < blob.count(); ++k)
        if (std::abs(depth(lake, blob.pos[k]) - b0) > rung) manual += std::abs(blob.w[k]);
    CHECK(ts.m_t[7] == doctest::Approx(manual).epsilon(1e-14));
}

TEST_CASE("deposited norms match a direct evaluation of the field") {
    const Lake lake = radial_lake();
    const Blob blob = init_blob(lake, {1.0, 0.0}, 1.0, 0.05, 2.0, BlobProfile::Uniform);
    const std::vector<double> field = deposit(blob, lake);
    const LpNorms lp = deposited_lp_norms(lake, field);

    // p = 1: integral of b |omega| = sum |b omega| h^2 = |gamma| (one sign)
    CHECK(lp.l1 == doctest::Approx(1.0).epsilon(1e-13));

    // p = 2: sqrt( sum (b omega)^2 / b * h^2 ), recomputed here longhand
    double s2 = 0.0;
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int id = lake.cell_of[k];
        s2 += field[id] * field[id] / lake.b[id];
    }
    CHECK(lp.l2 == doctest::Approx(std::sqrt(s2 * lake.h * lake.h)).epsilon(1e-14));
    CHECK(lp.l2 > 0.0);
}

TEST_CASE("weak localization radius follows its formula") {
    for (const double eps : {0.05, 0.025, 0.0125}) {
        const double L = std::abs(std::log(eps));
        CHECK(weak_localization_radius(eps) ==
              doctest::Approx(std::sqrt(std::log(L) / L)).epsilon(1e-15));
    }
    // shrinks (slowly) along the sweep
    CHECK(weak_localization_radius(0.0125) < weak_localization_radius(0.05));
}

TEST_CASE("full record ties the pieces together") {
    const Lake lake = radial_lake();
    const WeightedOperator op = assemble(lake);
    const Blob blob = init_blob(lake, {1.0, 0.0}, 1.0, 0.05, 2.0, BlobProfile::Uniform);
    const double b0 = depth(lake, blob.z0);
    const SolverOptions opts;

    const DiagnosticsRecord rec =
        sample_diagnostics(lake, op, blob, 0.25, b0, blob.eps, 0.5, 0.01, opts);

    CHECK(rec.t == 0.25);
    CHECK(norm(rec.z - center(blob)) == 0.0);
    CHECK(rec.I == inertia(blob, rec.z));
    CHECK(rec.K == transverse_moment(blob, lake, b0));
    CHECK(rec.R_used == weak_localization_radius(blob.eps));
    CHECK(rec.mass_out == mass_outside(blob, rec.z, rec.R_used));
    CHECK(rec.min_phi == blob_min_phi(lake, blob));
    CHECK(rec.h_ladder0 == 0.5);
    CHECK(rec.E > 0.0);
    CHECK(rec.lp1 == doctest::Approx(1.0).epsilon(1e-13));
    // fresh symmetric blob: center on z0, inertia on the seeded eps^2 scale
    CHECK(norm(rec.z - blob.z0) < 1e-12);
    CHECK(rec.I <= 4.0 * blob.gamma * blob.M0 * blob.M0 * blob.eps * blob.eps);
}
