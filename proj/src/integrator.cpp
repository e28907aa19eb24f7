#include "lakevortex/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "lakevortex/errors.hpp"

namespace lakevortex {

namespace {

/// Velocities of every particle of every blob at the blobs' current
/// positions: re-deposit, re-solve, then (v_self + F_others) / |ln eps|.
/// Also refreshes state.streams. Returns the max speed encountered.
double eval_velocities(const SimContext& ctx, SimState& state,
                       std::vector<std::vector<Vec2>>& vel) {
    const Lake& lake = *ctx.lake;
    const std::size_t nb = state.blobs.size();
    state.streams.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        const std::vector<double> rhs = deposit(state.blobs[i], lake);
        state.streams[i] = solve_stream(*ctx.op, rhs, ctx.solver);
    }
    double vmax = 0.0;
    vel.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        const Blob& blob = state.blobs[i];
        vel[i].resize(blob.pos.size());
        for (std::size_t p = 0; p < blob.pos.size(); ++p) {
            Vec2 v = velocity_from_stream(lake, state.streams[i], blob.pos[p]);
            if (nb > 1)
                v += external_field(lake, state.streams, ctx.monitor, i, blob.pos[p]);
            const Vec2 u = v / ctx.ln_eps;
            vel[i][p] = u;
            vmax = std::max(vmax, norm(u));
        }
    }
    return vmax;
}

void set_positions(SimState& state, const std::vector<std::vector<Vec2>>& base,
                   const std::vector<std::vector<Vec2>>& k, double c) {
    for (std::size_t i = 0; i < state.blobs.size(); ++i)
        for (std::size_t p = 0; p < base[i].size(); ++p)
            state.blobs[i].pos[p] = base[i][p] + c * k[i][p];
}

}  // namespace

double pilot_max_speed(const SimContext& ctx, SimState& state) {
    std::vector<std::vector<Vec2>> vel;
    const double vmax = eval_velocities(ctx, state, vel);
    state.max_speed = vmax;
    return vmax;
}

double step(const SimContext& ctx, SimState& state, double dt) {
    const std::size_t nb = state.blobs.size();
    std::vector<std::vector<Vec2>> base(nb);
    for (std::size_t i = 0; i < nb; ++i) base[i] = state.blobs[i].pos;

    std::vector<std::vector<Vec2>> k1, k2, k3, k4;
    double vmax = eval_velocities(ctx, state, k1);
    set_positions(state, base, k1, 0.5 * dt);
    vmax = std::max(vmax, eval_velocities(ctx, state, k2));
    set_positions(state, base, k2, 0.5 * dt);
    vmax = std::max(vmax, eval_velocities(ctx, state, k3));
    set_positions(state, base, k3, dt);
    vmax = std::max(vmax, eval_velocities(ctx, state, k4));

    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t p = 0; p < base[i].size(); ++p)
            state.blobs[i].pos[p] =
                base[i][p] +
                (dt / 6.0) * (k1[i][p] + 2.0 * k2[i][p] + 2.0 * k3[i][p] + k4[i][p]);

    state.t += dt;
    state.steps += 1;
    state.max_speed = vmax;
    return vmax;
}

GuardReport boundary_guard(const SimContext& ctx, const SimState& state) {
    const Lake& lake = *ctx.lake;
    const double floor = lake.phi_floor();
    GuardReport rep;
    rep.min_phi = std::numeric_limits<double>::infinity();
    Vec2 worst{0.0, 0.0};
    for (std::size_t i = 0; i < state.blobs.size(); ++i) {
        const Blob& blob = state.blobs[i];
        for (std::size_t p = 0; p < blob.pos.size(); ++p) {
            const double ph = lake.form.phi.eval(blob.pos[p]);
            if (ph < rep.min_phi) {
                rep.min_phi = ph;
                rep.blob = static_cast<int>(i);
                rep.particle = static_cast<int>(p);
                worst = blob.pos[p];
            }
        }
    }
    rep.min_dist = dist_boundary(lake, worst);
    rep.violated = rep.min_phi < floor;
    return rep;
}

namespace {

/// First particle outside its blob's level component, if any.
std::optional<std::string> monitor_check(const SimContext& ctx, const SimState& state) {
    const Lake& lake = *ctx.lake;
    for (std::size_t i = 0; i < state.blobs.size() && i < ctx.monitor.size(); ++i) {
        const ComponentSet& comp = ctx.monitor[i];
        if (comp.member.empty()) continue;  // vacuous (degenerate separation)
        const Blob& blob = state.blobs[i];
        for (std::size_t p = 0; p < blob.pos.size(); ++p) {
            int ci, cj;
            if (!lake.locate(blob.pos[p], ci, cj) || !comp.contains_cell(lake.flat(ci, cj))) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "particle %zu of vortex %zu left its level component at t=%.6g", p,
                              i, state.t);
                return std::string(msg);
            }
        }
    }
    return std::nullopt;
}

}  // namespace

TimeSeries simulate(const SimContext& ctx, SimState state, const TimeControls& controls) {
    if (!(controls.T >= 0.0) || !(controls.cfl > 0.0) || !(controls.sample_interval > 0.0) ||
        !(controls.dt_cap >= 0.0))
        throw ConfigError("time controls need T >= 0, cfl > 0, sample_interval > 0, dt_cap >= 0");
    const Lake& lake = *ctx.lake;

    TimeSeries series;
    series.blobs.resize(state.blobs.size());
    series.b0.resize(state.blobs.size());
    double ladder0 = 0.0;
    for (auto& comp : ctx.monitor) ladder0 = std::max(ladder0, comp.rho);
    if (ladder0 <= 0.0) ladder0 = std::max(lake.b_max - lake.b_min, lake.h);
    for (std::size_t i = 0; i < state.blobs.size(); ++i)
        series.b0[i] = depth(lake, state.blobs[i].z0);
    auto weight_sums = [](const std::vector<Blob>& blobs) {
        std::vector<double> sums;
        sums.reserve(blobs.size());
        for (const Blob& b : blobs)
            sums.push_back(std::accumulate(b.w.begin(), b.w.end(), 0.0));
        return sums;
    };
    series.circulation_start = weight_sums(state.blobs);

    auto sample = [&](const SimState& s) {
        // Build every record before committing any so a throw mid-way (the
        // energy entry re-deposits the particles) cannot leave ragged rows.
        std::vector<DiagnosticsRecord> recs;
        recs.reserve(s.blobs.size());
        for (std::size_t i = 0; i < s.blobs.size(); ++i)
            recs.push_back(sample_diagnostics(lake, *ctx.op, s.blobs[i], s.t, series.b0[i],
                                              ctx.eps, ladder0, ctx.delta, ctx.solver));
        series.times.push_back(s.t);
        for (std::size_t i = 0; i < s.blobs.size(); ++i)
            series.blobs[i].push_back(recs[i]);
    };

    pilot_max_speed(ctx, state);
    sample(state);

    series.dt_min = std::numeric_limits<double>::infinity();
    double next_sample = std::min(controls.sample_interval, controls.T);
    const double t_eps = 1e-12 * std::max(1.0, controls.T);

    SimState prev = state;
    while (state.t < controls.T - t_eps) {
        double dt_cfl = state.max_speed > 0.0 ? controls.cfl * lake.h / state.max_speed
                                              : controls.sample_interval;
        if (controls.dt_cap > 0.0) dt_cfl = std::min(dt_cfl, controls.dt_cap);
        const double dt = std::min(dt_cfl, next_sample - state.t);
        prev = state;
        bool guard_stop = false;
        std::string guard_msg;
        try {
            step(ctx, state, dt);
            const GuardReport guard = boundary_guard(ctx, state);
            if (guard.violated) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "shore guard: particle %d of vortex %d at phi=%.3e < floor %.3e",
                              guard.particle, guard.blob, guard.min_phi, lake.phi_floor());
                guard_msg = msg;
                guard_stop = true;
            }
        } catch (const GuardError& e) {
            guard_msg = e.what();
            guard_stop = true;
        }
        if (guard_stop) {
            state = prev;
            series.stop.reason = StopInfo::Reason::GuardTripped;
            series.stop.t = state.t;
            series.stop.detail = guard_msg;
            break;
        }
        if (auto fired = monitor_check(ctx, state)) {
            state = prev;
            series.stop.reason = StopInfo::Reason::MonitorFired;
            series.stop.t = state.t;
            series.stop.detail = *fired;
            break;
        }
        series.dt_min = std::min(series.dt_min, dt);
        series.dt_max = std::max(series.dt_max, dt);
        if (state.t >= next_sample - t_eps) {
            try {
                sample(state);
            } catch (const GuardError& e) {
                state = prev;
                series.stop.reason = StopInfo::Reason::GuardTripped;
                series.stop.t = state.t;
                series.stop.detail = e.what();
                break;
            }
            next_sample = std::min(next_sample + controls.sample_interval, controls.T);
        }
    }
    if (series.stop.reason == StopInfo::Reason::Completed) {
        series.stop.t = state.t;
    } else if (series.times.empty() || series.times.back() < state.t - t_eps) {
        sample(state);  // truncated series ends at the last committed state
    }
    series.steps = state.steps;
    series.circulation_end = weight_sums(state.blobs);
    if (!std::isfinite(series.dt_min)) series.dt_min = 0.0;
    return series;
}

}  // namespace lakevortex
