#pragma once

#include <vector>

#include "lakevortex/vec2.hpp"

namespace lakevortex {

/// Instance of the sharp convolution bound for radially decreasing kernels:
/// over densities 0 <= f <= M0 with total mass gamma,
///   sup_f  integral g(|x-y|) f(y) dy  =  2 pi M0 * int_0^{R0} s g(s) ds,
///   R0 = sqrt(gamma / (pi M0)),
/// attained by the capped indicator f* = M0 * 1_{B(x, R0)}.
/// The kernel is given by samples on an ascending radius grid and read by
/// linear interpolation, extended flat below the first sample and zero past
/// the last (truncation).
struct RearrangementInstance {
    double M0 = 1.0;
    double gamma = 1.0;
    std::vector<double> s;  ///< radii, ascending, s.front() >= 0
    std::vector<double> g;  ///< samples, nonincreasing, nonnegative
};

/// Closed-form right-hand side, trapezoid in s*g(s) with an exact split at
/// R0 and the exact piece (g(s0) s0^2)/2 below the first sample.
double rearrangement_bound(const RearrangementInstance& inst);

/// Interpolated kernel value (shared by bound and brute force).
double kernel_value(const RearrangementInstance& inst, double r);

/// Exact greedy optimum of the discretized linear program on an m x m cell
/// grid over [dom0, dom1]^2: fill cells in decreasing kernel order at
/// density M0 until the mass budget gamma runs out (last cell partial).
struct BruteForceResult {
    double value = 0.0;
    int m = 0;
    double cell_area = 0.0;
    std::vector<double> density;   ///< m*m, row-major, in [0, M0]
    std::vector<double> kernel;    ///< g(|x - y_cell|) per cell
    int partial_cells = 0;         ///< cells filled strictly between 0 and M0
};
BruteForceResult brute_force_sup(const RearrangementInstance& inst, Vec2 x, Vec2 dom0,
                                 Vec2 dom1, int m);

}  // namespace lakevortex
