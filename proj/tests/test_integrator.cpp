// Time marching: RK4 particle transport, CFL sampling, guards and monitors.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lakevortex/blob.hpp"
#include "lakevortex/errors.hpp"
#include "lakevortex/integrator.hpp"

using namespace lakevortex;

namespace {

Lake radial_lake(int resolution = 64) {
    LakeSpec spec;
    spec.shape.kind = Shape::Kind::Disc;
    spec.shape.radius = 2.0;
    spec.depth.c = ScalarExpr::radial(1.0, 0.5);  // b = 1 + r^2/2
    spec.resolution = resolution;
    return build_lake(spec);
}

struct Rig {
    Lake lake;
    WeightedOperator op;
    SimContext ctx;
    SimState state;

    explicit Rig(Vec2 z0 = {1.0, 0.0}, double eps = 0.05, int resolution = 64)
        : lake(radial_lake(resolution)), op(assemble(lake)) {
        ctx.lake = &lake;
        ctx.op = &op;
        ctx.eps = eps;
        ctx.ln_eps = std::log(1.0 / eps);
        ctx.delta = 0.5 * eps;
        ctx.solver.backend = SolverBackend::Direct;
        state.blobs.push_back(init_blob(lake, z0, 1.0, eps, 2.0, BlobProfile::Uniform));
    }
};

double sup_dist(const Blob& a, const Blob& b) {
    REQUIRE(a.pos.size() == b.pos.size());
    double d = 0.0;
    for (std::size_t p = 0; p < a.pos.size(); ++p) d = std::max(d, norm(a.pos[p] - b.pos[p]));
    return d;
}

}  // namespace

TEST_CASE("time controls are validated up front") {
    Rig rig;
    TimeControls bad;
    bad.T = -1.0;
    CHECK_THROWS_AS(simulate(rig.ctx, rig.state, bad), ConfigError);
    bad = TimeControls{};
    bad.cfl = 0.0;
    CHECK_THROWS_AS(simulate(rig.ctx, rig.state, bad), ConfigError);
    bad = TimeControls{};
    bad.sample_interval = 0.0;
    CHECK_THROWS_AS(simulate(rig.ctx, rig.state, bad), ConfigError);
    bad = TimeControls{};
    bad.dt_cap = -0.1;
    CHECK_THROWS_AS(simulate(rig.ctx, rig.state, bad), ConfigError);
}

TEST_CASE("a zero-horizon march returns the single initial sample") {
    Rig rig;
    TimeControls controls;
    controls.T = 0.0;
    const TimeSeries series = simulate(rig.ctx, rig.state, controls);
    CHECK(series.times.size() == 1);
    CHECK(series.times[0] == 0.0);
    CHECK(series.blobs.size() == 1);
    CHECK(series.blobs[0].size() == 1);
    CHECK(series.stop.reason == StopInfo::Reason::Completed);
    CHECK(series.stop.t == 0.0);
    CHECK(series.steps == 0);
    CHECK(series.dt_min == 0.0);
    CHECK(series.dt_max == 0.0);
    REQUIRE(series.circulation_start.size() == 1);
    CHECK(series.circulation_start == series.circulation_end);
    CHECK(series.b0[0] == depth(rig.lake, rig.state.blobs[0].z0));
}

TEST_CASE("pilot speed is positive and repeatable") {
    Rig rig;
    const double v1 = pilot_max_speed(rig.ctx, rig.state);
    CHECK(v1 > 0.0);
    CHECK(rig.state.max_speed == v1);
    CHECK(rig.state.streams.size() == 1);
    const double v2 = pilot_max_speed(rig.ctx, rig.state);
    CHECK(v2 == v1);  // same positions, same solve, same reduction order
}

TEST_CASE("identical marches replay bit for bit") {
    Rig rig;
    TimeControls controls;
    controls.T = 0.06;
    controls.sample_interval = 0.02;
    const TimeSeries a = simulate(rig.ctx, rig.state, controls);
    const TimeSeries b = simulate(rig.ctx, rig.state, controls);

    CHECK(a.steps == b.steps);
    CHECK(a.dt_min == b.dt_min);
    CHECK(a.dt_max == b.dt_max);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t k = 0; k < a.times.size(); ++k) CHECK(a.times[k] == b.times[k]);
    REQUIRE(a.blobs[0].size() == b.blobs[0].size());
    for (std::size_t k = 0; k < a.blobs[0].size(); ++k) {
        CHECK(a.blobs[0][k].z.x == b.blobs[0][k].z.x);
        CHECK(a.blobs[0][k].z.y == b.blobs[0][k].z.y);
        CHECK(a.blobs[0][k].I == b.blobs[0][k].I);
        CHECK(a.blobs[0][k].E == b.blobs[0][k].E);
        CHECK(a.blobs[0][k].lp2 == b.blobs[0][k].lp2);
    }
    CHECK(a.circulation_start == b.circulation_start);
    CHECK(a.circulation_end == b.circulation_end);
}

TEST_CASE("one step is exactly the classical four-stage combination") {
    Rig rig;
    const double dt = 4e-3;
    const std::vector<Vec2> base = rig.state.blobs[0].pos;

    // hand-rolled stages through the same public pipeline: deposit, solve,
    // interpolate, divide by |ln eps|
    auto stage = [&](const std::vector<Vec2>& at) {
        Blob probe = rig.state.blobs[0];
        probe.pos = at;
        const StreamField psi = solve_stream(rig.op, deposit(probe, rig.lake), rig.ctx.solver);
        std::vector<Vec2> k(at.size());
        for (std::size_t p = 0; p < at.size(); ++p)
            k[p] = velocity_from_stream(rig.lake, psi, at[p]) / rig.ctx.ln_eps;
        return k;
    };
    auto shifted = [&](const std::vector<Vec2>& k, double c) {
        std::vector<Vec2> at(base.size());
        for (std::size_t p = 0; p < base.size(); ++p) at[p] = base[p] + c * k[p];
        return at;
    };
    const std::vector<Vec2> k1 = stage(base);
    const std::vector<Vec2> k2 = stage(shifted(k1, 0.5 * dt));
    const std::vector<Vec2> k3 = stage(shifted(k2, 0.5 * dt));
    const std::vector<Vec2> k4 = stage(shifted(k3, dt));

    step(rig.ctx, rig.state, dt);
    double worst = 0.0;
    for (std::size_t p = 0; p < base.size(); ++p) {
        const Vec2 expect =
            base[p] + (dt / 6.0) * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
        worst = std::max(worst, norm(rig.state.blobs[0].pos[p] - expect));
    }
    CHECK(worst < 1e-15);
    CHECK(rig.state.steps == 1);
    CHECK(rig.state.t == dt);
}

TEST_CASE("refining the step size converges") {
    Rig rig;
    SimState coarse = rig.state, mid = rig.state, ref = rig.state;
    const double T = 0.02;
    step(rig.ctx, coarse, T);
    for (int k = 0; k < 2; ++k) step(rig.ctx, mid, T / 2);
    for (int k = 0; k < 8; ++k) step(rig.ctx, ref, T / 8);

    const double err_coarse = sup_dist(coarse.blobs[0], ref.blobs[0]);
    const double err_mid = sup_dist(mid.blobs[0], ref.blobs[0]);
    REQUIRE(err_coarse > 1e-12);  // above the floating-point floor
    CHECK(err_mid < err_coarse);
    // the particle field is only piecewise smooth (bilinear interpolation has
    // kinks on cell lines), so the textbook 4th-order ratio of 16 is not
    // observable here; the smooth-field order check lives in the limit-ODE
    // suite. Demand better-than-first-order shrinkage.
    CHECK(err_coarse / err_mid > 2.0);
}

TEST_CASE("a step followed by its negation returns to the start") {
    Rig rig;
    const SimState start = rig.state;
    const double dt = 1e-3;
    step(rig.ctx, rig.state, dt);
    step(rig.ctx, rig.state, -dt);  // autonomous field: same stages reversed
    CHECK(sup_dist(rig.state.blobs[0], start.blobs[0]) < 1e-10);
    CHECK(std::abs(rig.state.t) < 1e-15);
}

TEST_CASE("the boundary guard reports the worst particle") {
    Rig rig;
    GuardReport rep = boundary_guard(rig.ctx, rig.state);
    CHECK_FALSE(rep.violated);
    CHECK(rep.min_phi >= rig.lake.phi_floor());
    CHECK(rep.blob == 0);
    CHECK(rep.particle >= 0);
    CHECK(rep.min_dist > 0.0);

    // drag one particle into the topography skin phi < h * max|grad phi|
    const double r_skin = 2.0 - 0.25 * rig.lake.h;
    rig.state.blobs[0].pos[3] = {r_skin, 0.0};
    rep = boundary_guard(rig.ctx, rig.state);
    CHECK(rep.violated);
    CHECK(rep.blob == 0);
    CHECK(rep.particle == 3);
    CHECK(rep.min_phi < rig.lake.phi_floor());
    CHECK(rep.min_phi > 0.0);  // still inside the lake, only below the floor
}

TEST_CASE("an oversized leap trips the guard and rolls back") {
    Rig rig({1.8, 0.0});  // close to the shore, but a valid start
    TimeControls controls;
    controls.T = 10.0;
    controls.cfl = 1e6;  // absurd: the first step spans a whole sample window
    controls.sample_interval = 10.0;
    const TimeSeries series = simulate(rig.ctx, rig.state, controls);
    CHECK(series.stop.reason == StopInfo::Reason::GuardTripped);
    CHECK(series.stop.t == 0.0);  // the offending step was discarded
    CHECK_FALSE(series.stop.detail.empty());
    CHECK(series.times.size() == 1);
    CHECK(series.times[0] == 0.0);
    CHECK(series.steps == 0);
    CHECK(series.circulation_start == series.circulation_end);
}

TEST_CASE("the exit monitor halts the march when a particle leaves its set") {
    Rig rig;  // blob at (1,0) sits at depth 1.5
    // watch a component the blob never occupied: the band around r = 0.5
    rig.ctx.monitor.push_back(level_component(rig.lake, {0.5, 0.0}, 0.05));
    TimeControls controls;
    controls.T = 1.0;
    const TimeSeries series = simulate(rig.ctx, rig.state, controls);
    CHECK(series.stop.reason == StopInfo::Reason::MonitorFired);
    CHECK(series.stop.t == 0.0);  // fired on the first step, rolled back
    CHECK(series.stop.detail.find("left its level component") != std::string::npos);
    CHECK(series.times.size() == 1);

    // an empty member set is a vacuous monitor: the march completes
    rig.ctx.monitor[0] = ComponentSet{};
    TimeControls short_run;
    short_run.T = 0.02;
    const TimeSeries ok = simulate(rig.ctx, rig.state, short_run);
    CHECK(ok.stop.reason == StopInfo::Reason::Completed);
}

TEST_CASE("a completed march samples the full schedule and keeps the weights") {
    Rig rig;
    TimeControls controls;
    controls.T = 0.1;
    controls.sample_interval = 0.025;
    controls.dt_cap = 5e-3;
    const TimeSeries series = simulate(rig.ctx, rig.state, controls);

    CHECK(series.stop.reason == StopInfo::Reason::Completed);
    CHECK(series.times.size() == 5);  // t = 0, .025, .05, .075, .1
    CHECK(series.times.front() == 0.0);
    CHECK(series.times.back() == doctest::Approx(0.1).epsilon(1e-9));
    for (std::size_t k = 1; k < series.times.size(); ++k)
        CHECK(series.times[k] > series.times[k - 1]);
    CHECK(series.blobs[0].size() == series.times.size());

    CHECK(series.steps >= static_cast<long>(series.times.size() - 1));
    CHECK(series.dt_min > 0.0);
    CHECK(series.dt_min <= series.dt_max);
    CHECK(series.dt_max <= controls.dt_cap);

    // weights are never touched by the march: equal bits, not just equal values
    const double w0 = std::accumulate(rig.state.blobs[0].w.begin(), rig.state.blobs[0].w.end(), 0.0);
    REQUIRE(series.circulation_start.size() == 1);
    CHECK(series.circulation_start[0] == w0);
    CHECK(series.circulation_end[0] == w0);

    // the sampled center actually moved (the vortex rotates)
    const Vec2 z_first = series.blobs[0].front().z;
    const Vec2 z_last = series.blobs[0].back().z;
    CHECK(norm(z_last - z_first) > 1e-4);
    CHECK(norm(z_last) == doctest::Approx(norm(z_first)).epsilon(1e-3));  // level line
}
