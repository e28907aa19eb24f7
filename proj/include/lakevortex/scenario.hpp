#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lakevortex/integrator.hpp"
#include "lakevortex/limit_ode.hpp"
#include "lakevortex/run_config.hpp"

namespace lakevortex {

/// One executed member run of a config at a single eps. The lake and the
/// operator live behind stable pointers because the operator and the context
/// refer to them.
struct ScenarioRun {
    std::unique_ptr<Lake> lake;
    std::unique_ptr<WeightedOperator> op;
    std::vector<Blob> blobs0;  ///< initial particle states
    SimContext ctx;
    TimeSeries series;
    double eps = 0.0;
    double ln_eps = 0.0;
    std::string separation_note;  ///< why the monitor is vacuous, if it is
    double wall_clock_s = 0.0;    ///< recorded in the manifest only
};

/// Build the lake, derive the separation constants (falling back to a
/// vacuous exit monitor when the depth admits no boundary-disjoint level
/// band — constant depth, or level bands that always reach the shore), seed
/// the blobs and march to T. Overlapping level components are a hard
/// ConfigError-like failure (SeparationError propagates).
ScenarioRun run_scenario(const RunConfig& config, double eps);

/// Sweep-stability verdicts. `bounded`: PASS iff max <= 2*min + atol or the
/// values are nonincreasing (within atol). `decreasing`: PASS iff strictly
/// decreasing. Fewer than two values: INCONCLUSIVE.
std::string bounded_verdict(const std::vector<double>& values, double atol);
std::string decreasing_verdict(const std::vector<double>& values);

struct SweepLaw {
    std::string name;
    std::vector<double> values;  ///< one per sweep member, config order
    std::string protocol;        ///< "factor2-or-monotone" or "decreasing"
    std::string verdict;         ///< PASS / FAIL / INCONCLUSIVE
};

/// The six scaling laws tracked across an eps sweep (L = |ln eps|):
///   inertia_scaled       sup_t I * L            factor2-or-monotone
///   transverse_scaled    sup_t K * L            factor2-or-monotone
///   energy_ratio         E(0) / ((1/2pi) g^2 b(z0) L)   factor2-or-monotone
///   trajectory_error     sup_t |z_eps - z_limit|        decreasing
///   support_scaled       sup_t R_t * L^(1/8)    factor2-or-monotone
///   mass_out_scaled      sup_t mass_out * ln L  factor2-or-monotone
/// plus the affine fit E(0) = slope * L + offset across the members.
struct SweepReport {
    std::vector<double> eps;
    std::vector<SweepLaw> laws;
    double energy_slope = 0.0;
    double energy_offset = 0.0;
    double energy_fit_residual = 0.0;  ///< max |E(0) - fit|
    bool all_pass = false;             ///< every law PASS
};

SweepReport sweep_report(const RunConfig& config, const std::vector<ScenarioRun>& runs);

/// Limit trajectory of blob `blob` sampled at the run's sample times, using
/// the lake's resolved depth law and a fine internal step.
LimitTrajectory limit_reference(const ScenarioRun& run, std::size_t blob);

/// Per-sample centers of one blob, in sample order.
std::vector<Vec2> center_path(const ScenarioRun& run, std::size_t blob);

/// Write the full artifact set of one member run into `dir`: per-blob time
/// series CSVs, initial particle snapshots with sidecars, a trajectory plot
/// and the manifest.
void write_run_artifacts(const std::string& dir, const RunConfig& config,
                         const ScenarioRun& run);

/// Sweep-level artifacts: member manifests live in eps_* subdirectories;
/// this adds the scaling report (JSON), the scaling plot and the top-level
/// manifest with the per-law verdicts.
void write_sweep_artifacts(const std::string& dir, const RunConfig& config,
                           const std::vector<ScenarioRun>& runs, const SweepReport& report);

}  // namespace lakevortex
