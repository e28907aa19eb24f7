#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lakevortex/diagnostics.hpp"
#include "lakevortex/velocity.hpp"

namespace lakevortex {

/// Shared immutable context of a run: the lake, its assembled operator, the
/// per-vortex level components watched by the exit monitor, and the scales.
/// Particle velocities are (v + F) / |ln eps|: the self-induced grid velocity
/// plus the other vortices' fields, in the slow time of the concentration
/// scaling.
struct SimContext {
    const Lake* lake = nullptr;
    const WeightedOperator* op = nullptr;
    std::vector<ComponentSet> monitor;  ///< per blob; empty set = vacuous
    double eps = 0.0;
    double ln_eps = 1.0;  ///< |ln eps|
    double delta = 0.0;   ///< kernel mollification (diagnostics only)
    SolverOptions solver;
};

struct SimState {
    double t = 0.0;
    std::vector<Blob> blobs;
    std::vector<StreamField> streams;  ///< last solve per blob
    double max_speed = 0.0;            ///< max particle speed seen in the last step
    long steps = 0;
};

struct TimeControls {
    double T = 1.0;
    double cfl = 0.5;
    double sample_interval = 0.05;
    double dt_cap = 0.0;  ///< optional hard cap on the step (0 = CFL only)
};

struct StopInfo {
    enum class Reason { Completed, MonitorFired, GuardTripped };
    Reason reason = Reason::Completed;
    double t = 0.0;        ///< last valid time (the offending step is discarded)
    std::string detail;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<std::vector<DiagnosticsRecord>> blobs;  ///< [blob][sample]
    StopInfo stop;
    double rho_b = 0.0, r0 = 0.0;
    bool separation_degenerate = false;
    std::vector<double> b0;  ///< depth level b(z0) per blob
    long steps = 0;
    double dt_min = 0.0, dt_max = 0.0;
    /// Per-blob particle weight sums at start and end of the march, computed
    /// by the same left-to-right summation: equal bits iff no weight moved.
    std::vector<double> circulation_start, circulation_end;
};

/// One classical RK4 step of all particle positions; the stream fields are
/// re-deposited and re-solved at every stage, weights never change. Returns
/// the max particle speed over the four stages (feeds the next CFL choice).
/// Pre: dt <= cfl * h / state.max_speed whenever max_speed > 0.
double step(const SimContext& ctx, SimState& state, double dt);

/// Shore guard report: simulate refuses to commit a state whose particles
/// dip below the topography floor h * max|grad phi|.
struct GuardReport {
    double min_phi = 0.0;
    double min_dist = 0.0;  ///< distance to the staircase of the worst particle
    bool violated = false;
    int blob = -1, particle = -1;
};
GuardReport boundary_guard(const SimContext& ctx, const SimState& state);

/// March to controls.T with CFL-limited steps, sampling diagnostics every
/// sample_interval (and at t = 0 and T). If the exit monitor fires or a
/// guard trips, the offending step is rolled back and the truncated series
/// carries the stop reason.
TimeSeries simulate(const SimContext& ctx, SimState state, const TimeControls& controls);

/// Pilot evaluation of the particle speeds at the current state (used to
/// size the first step; identical code path as the in-step stages).
double pilot_max_speed(const SimContext& ctx, SimState& state);

}  // namespace lakevortex
