#pragma once

#include <array>
#include <vector>

#include "lakevortex/blob.hpp"
#include "lakevortex/elliptic.hpp"

namespace lakevortex {

/// Number of dyadic rungs in the transverse-mass ladder m_t(rho_b / 2^k).
constexpr int kMassLadder = 8;

/// One sampled row of the run diagnostics. All moments are particle sums;
/// sign-indefinite blobs use |w| so the concentration measures stay
/// nonnegative, and J_k stay signed so the algebraic expansion of K holds.
struct DiagnosticsRecord {
    double t = 0.0;
    Vec2 z;                ///< weighted center sum w x / gamma
    double I = 0.0;        ///< inertia sum |w| |x-z|^2
    double K = 0.0;        ///< transverse moment sum |w| (b - b0)^2
    double E = 0.0;        ///< stream energy of the deposited field
    double J1 = 0.0, J2 = 0.0, J4 = 0.0;  ///< depth moments sum w b^k
    double psi_moment = 0.0;              ///< sum_j w_j psi(x_j)
    double mass_out = 0.0;                ///< |w| mass outside B(z, R_used)
    double R_used = 0.0;                  ///< weak localization radius
    double R_t = 0.0;                     ///< max_j |b(x_j) - b0|
    std::array<double, kMassLadder> m_t{};  ///< |w| mass with |b-b0| > h_k
    double h_ladder0 = 0.0;                 ///< top rung (h_k = h0 / 2^k)
    double min_phi = 0.0;                   ///< min topography over particles
    double lp1 = 0.0, lp2 = 0.0;  ///< deposited ||b^{1/p} omega||_p, p = 1, 2
};

Vec2 center(const Blob& blob);
double inertia(const Blob& blob, Vec2 z);
double transverse_moment(const Blob& blob, const Lake& lake, double b0);
double depth_moment(const Blob& blob, const Lake& lake, int k);
double mass_outside(const Blob& blob, Vec2 z, double R);
double psi_self_moment(const Lake& lake, const Blob& blob, double delta);
double blob_min_phi(const Lake& lake, const Blob& blob);

struct TransverseSupport {
    double R_t = 0.0;
    std::array<double, kMassLadder> m_t{};
};
TransverseSupport transverse_support(const Blob& blob, const Lake& lake, double b0,
                                     double h_ladder0);

/// Deposited-field norms ||b^{1/p} omega||_p^p = sum (b omega)^p / b^{p-1} h^2
/// for p = 1, 2 (returned as the norms themselves).
struct LpNorms {
    double l1 = 0.0, l2 = 0.0;
};
LpNorms deposited_lp_norms(const Lake& lake, const std::vector<double>& b_omega);

/// Assemble the full record at time t for one blob (re-deposits and solves
/// for the energy entry).
DiagnosticsRecord sample_diagnostics(const Lake& lake, const WeightedOperator& op,
                                     const Blob& blob, double t, double b0, double eps,
                                     double h_ladder0, double delta, const SolverOptions& opts);

/// Weak localization radius sqrt(ln|ln eps| / |ln eps|).
double weak_localization_radius(double eps);

}  // namespace lakevortex
