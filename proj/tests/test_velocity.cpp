// Grid velocities, particle kernels and the induced-field decomposition.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lakevortex/blob.hpp"
#include "lakevortex/elliptic.hpp"
#include "lakevortex/errors.hpp"
#include "lakevortex/lake.hpp"
#include "lakevortex/velocity.hpp"

using namespace lakevortex;

namespace {

Lake flat_disc(int resolution = 64, double radius = 1.0) {
    LakeSpec spec;
    spec.shape.kind = Shape::Kind::Disc;
    spec.shape.radius = radius;
    spec.depth.c = ScalarExpr::constant(1.0);
    spec.resolution = resolution;
    return build_lake(spec);
}

}  // namespace

TEST_CASE("stream velocity of a centered source is the 1/(2 pi r) rotation") {
    const Lake lake = flat_disc();
    const WeightedOperator op = assemble(lake);
    // unit-mass delta at the center: Psi = G(., 0), v = perp(grad Psi)
    const StreamField g = green_kernel(op, {0.0, 0.0});

    int si, sj;
    REQUIRE(lake.locate({0.0, 0.0}, si, sj));
    const Vec2 y = lake.cell_center(si, sj);
    for (const double angle : {0.1, 1.1, 2.3, 4.0, 5.5}) {
        const Vec2 x = y + rotate({0.5, 0.0}, angle);
        const Vec2 v = velocity_from_stream(lake, g, x);
        const Vec2 rad = (x - y) / norm(x - y);
        const double speed = 1.0 / (2.0 * M_PI * norm(x - y));
        CHECK(std::abs(dot(v, rad)) < 0.02 * speed);          // tangential
        CHECK(dot(v, perp(rad)) == doctest::Approx(speed).epsilon(0.02));  // counterclockwise
    }
}

TEST_CASE("velocity queries too close to the shore are refused") {
    const Lake lake = flat_disc();
    const WeightedOperator op = assemble(lake);
    const StreamField g = green_kernel(op, {0.0, 0.0});
    CHECK_THROWS_AS(velocity_from_stream(lake, g, {1.0 - 0.25 * lake.h, 0.0}), GuardError);
}

TEST_CASE("particle kernel matches its closed form for a single particle") {
    const Lake lake = flat_disc();
    Blob one;
    one.pos = {{0.1, -0.2}};
    one.w = {0.7};
    one.gamma = 0.7;
    one.z0 = one.pos[0];

    const double delta = 0.02;
    const Vec2 x{0.4, 0.1};
    const Vec2 d = x - one.pos[0];
    // flat lake: v_K = (w / 2 pi) perp(d) / (|d|^2 + delta^2)
    const Vec2 expect = (0.7 / (2.0 * M_PI)) * perp(d) / (norm2(d) + delta * delta);
    const Vec2 got = v_K(lake, one, x, delta);
    CHECK(got.x == doctest::Approx(expect.x).epsilon(1e-12));
    CHECK(got.y == doctest::Approx(expect.y).epsilon(1e-12));
}

TEST_CASE("particle kernel cancels by parity at the blob center") {
    const Lake lake = flat_disc(128);
    // > 1024 particles so the chunked reduction crosses chunk boundaries
    const Blob blob = init_blob(lake, {0.3, 0.0}, 1.0, 0.1, 2.0, BlobProfile::Uniform);
    REQUIRE(blob.count() > 1024);
    const Vec2 v = v_K(lake, blob, blob.z0, kernel_delta(lake, blob));
    CHECK(norm(v) < 1e-12);

    // and twice the same call gives bit-identical values (fixed chunk order)
    const Vec2 w1 = v_K(lake, blob, {0.52, 0.13}, 0.01);
    const Vec2 w2 = v_K(lake, blob, {0.52, 0.13}, 0.01);
    CHECK(w1 == w2);
}

TEST_CASE("log moment drives the level-line drift term") {
    LakeSpec spec;
    spec.shape.kind = Shape::Kind::Disc;
    spec.shape.radius = 2.0;
    spec.depth.c = ScalarExpr::radial(1.0, 0.5);
    spec.resolution = 64;
    const Lake lake = build_lake(spec);

    Blob one;
    one.pos = {{1.0, 0.0}};
    one.w = {1.0};
    one.gamma = 1.0;
    one.z0 = one.pos[0];

    const double delta = 0.05;
    const Vec2 x{1.2, 0.0};
    const PsiVL pl = psi_log_and_vL(lake, one, x, delta);
    const double bx = 1.0 + 0.5 * norm2(x);
    const double bj = 1.5;
    const double psi_expect = std::log(0.2) * std::sqrt(bx * bj);
    CHECK(pl.psi == doctest::Approx(psi_expect).epsilon(1e-3));  // b via grid samples
    // vL = psi / (4 pi b^2) perp(grad b), grad b = (x, y)
    const Vec2 vl_expect = (psi_expect / (4.0 * M_PI * bx * bx)) * perp(Vec2{1.2, 0.0});
    CHECK(pl.vL.x == doctest::Approx(vl_expect.x).epsilon(1e-2));
    CHECK(pl.vL.y == doctest::Approx(vl_expect.y).epsilon(1e-2));
    // below the mollification floor the log saturates at ln(delta)
    const PsiVL close = psi_log_and_vL(lake, one, one.pos[0] + Vec2{delta / 4.0, 0.0}, delta);
    CHECK(close.psi == doctest::Approx(std::log(delta) * 1.5).epsilon(1e-2));
}

TEST_CASE("decomposition closes and the remainder is the image drift") {
    // Flat unit disc, blob at (0.5, 0): v_L = 0 (flat depth), v_K cancels at
    // the center by parity, so v(z0) = v_R(z0) is the boundary-image field,
    // magnitude |z| / (2 pi (1 - |z|^2)) = 1/(3 pi), direction +y.
    const Lake lake = flat_disc(128);
    const WeightedOperator op = assemble(lake);
    const Blob blob = init_blob(lake, {0.5, 0.0}, 1.0, 0.05, 2.0, BlobProfile::Uniform);
    const StreamField psi = solve_stream(op, deposit(blob, lake));

    const VelocitySample s =
        velocity_sample(lake, psi, blob, blob.z0, kernel_delta(lake, blob));
    CHECK(s.vR == s.v - s.vK - s.vL);  // the split is exact by construction
    CHECK(norm(s.vL) == 0.0);
    CHECK(norm(s.vK) < 1e-12);

    const double drift = 1.0 / (3.0 * M_PI);
    CHECK(s.v.y == doctest::Approx(drift).epsilon(0.03));
    CHECK(std::abs(s.v.x) < 0.03 * drift);
}

TEST_CASE("external field of a centered vortex is the exact point rotation") {
    // Radius-4 disc: the image of a centered source sits at infinity, so at
    // distance 1 the other-vortex field is exactly 1/(2 pi) counterclockwise.
    const Lake lake = flat_disc(32, 4.0);
    const WeightedOperator op = assemble(lake);
    const Blob self = init_blob(lake, {-2.0, 0.0}, 1.0, 0.05, 2.0, BlobProfile::Uniform);
    const Blob other = init_blob(lake, {0.0, 0.0}, 1.0, 0.05, 2.0, BlobProfile::Uniform);
    const std::vector<StreamField> streams{solve_stream(op, deposit(self, lake)),
                                           solve_stream(op, deposit(other, lake))};

    const Vec2 f = external_field(lake, streams, {}, 0, {1.0, 0.0});
    CHECK(f.y == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(0.02));
    CHECK(std::abs(f.x) < 0.02 / (2.0 * M_PI));

    CHECK_THROWS_AS(external_field(lake, streams, {}, 0, {9.0, 0.0}), GuardError);
}

TEST_CASE("external field refuses queries inside a foreign neighbourhood") {
    LakeSpec spec;
    spec.shape.kind = Shape::Kind::Disc;
    spec.shape.radius = 2.0;
    spec.depth.c = ScalarExpr::radial(1.0, 0.5);
    spec.resolution = 64;
    const Lake lake = build_lake(spec);
    const WeightedOperator op = assemble(lake);

    const std::vector<Vec2> centers{{0.6, 0.0}, {-1.2, 0.0}};
    const SeparationConstants sep = separation_constants(lake, centers);
    const Blob b0 = init_blob(lake, centers[0], 1.0, 0.025, 2.0, BlobProfile::Uniform);
    const Blob b1 = init_blob(lake, centers[1], -1.0, 0.025, 2.0, BlobProfile::Uniform);
    const std::vector<StreamField> streams{solve_stream(op, deposit(b0, lake)),
                                           solve_stream(op, deposit(b1, lake))};

    // fine far from blob 1's band, fatal inside it
    CHECK_NOTHROW(external_field(lake, streams, sep.components, 0, {0.62, 0.01}));
    CHECK_THROWS_AS(external_field(lake, streams, sep.components, 0, centers[1]), GuardError);
}
