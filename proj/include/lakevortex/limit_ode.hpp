#pragma once

#include <vector>

#include "lakevortex/expr.hpp"

namespace lakevortex {

/// Sampled solution of the point-vortex drift law
///   dz/dt = -(gamma / 4 pi) * perp(grad b(z)) / b(z),
/// which transports z along level lines of the depth.
struct LimitTrajectory {
    std::vector<double> t;
    std::vector<Vec2> z;
    double level0 = 0.0;          ///< b(z(0))
    double max_level_drift = 0.0; ///< max |b(z(t)) - b(z(0))| over samples
};

/// RK4 integration with the analytic depth gradient (never grid samples).
/// Samples at t = 0, sample_interval, 2*sample_interval, ..., T (the last
/// step is shortened to land on each sample time exactly).
LimitTrajectory integrate_limit(const DepthForm& depth, Vec2 z0, double gamma, double T,
                                double dt, double sample_interval);

/// Same sampling, but at caller-provided times (useful for comparing against
/// a simulation's sample grid).
LimitTrajectory integrate_limit_at(const DepthForm& depth, Vec2 z0, double gamma,
                                   const std::vector<double>& times, double dt);

/// Closed form for radially symmetric depths about `center`: uniform
/// rotation at angular rate  -gamma * b'(r0) / (4 pi b(r0) r0).
LimitTrajectory analytic_radial(const DepthForm& depth, Vec2 center, Vec2 z0, double gamma,
                                const std::vector<double>& times);

/// Radial depth derivative db/dr at radius r (requires radially symmetric
/// c and phi about `center`; throws otherwise).
double radial_depth_derivative(const DepthForm& depth, Vec2 center, double r);

struct CompareReport {
    double sup_err = 0.0;
    std::vector<double> err;  ///< per sample time
};

/// Pointwise distance between two trajectories sampled at the same times.
CompareReport compare(const LimitTrajectory& a, const std::vector<Vec2>& b);

}  // namespace lakevortex
