#pragma once

#include <vector>

#include "lakevortex/blob.hpp"
#include "lakevortex/elliptic.hpp"
#include "lakevortex/lake.hpp"

namespace lakevortex {

/// Default mollification length for particle kernels.
inline double kernel_delta(const Lake& lake, const Blob& blob) {
    return 0.5 * std::max(lake.h, blob.spacing);
}

/// Velocity of the solved stream field: v = (1/b) perp(grad Psi), with the
/// gradient taken by centered differences at cell centers (exterior ghosts
/// are zero, matching the solve) and interpolated bilinearly. The point must
/// be far enough inside that the stencil only sees interior cells (about 2h).
Vec2 velocity_from_stream(const Lake& lake, const StreamField& psi, Vec2 x);

/// Singular particle-sum part:
///   v_K(x) = 1/(2 pi b(x)) * sum_j K_delta(x, x_j) sqrt(b(x) b(x_j)) w_j,
/// K_delta(x,y) = (x-y)^perp / (|x-y|^2 + delta^2). Deterministic fixed-size
/// chunked accumulation.
Vec2 v_K(const Lake& lake, const Blob& blob, Vec2 x, double delta);

/// Logarithmic moment and the slow drift term it drives:
///   psi(x)  = sum_j ln(max(|x-x_j|, delta)) sqrt(b(x) b(x_j)) w_j,
///   v_L(x)  = perp(grad b(x)) / (4 pi b(x)^2) * psi(x).
struct PsiVL {
    double psi = 0.0;
    Vec2 vL;
};
PsiVL psi_log_and_vL(const Lake& lake, const Blob& blob, Vec2 x, double delta);

/// Full decomposition sample at x: v (grid velocity) and its split
/// v = v_K + v_L + v_R, where v_R is defined by subtraction.
struct VelocitySample {
    Vec2 v, vK, vL, vR;
    double psi = 0.0;
};
VelocitySample velocity_sample(const Lake& lake, const StreamField& psi, const Blob& blob,
                               Vec2 x, double delta);

/// Velocity induced at x by the other vortices' stream fields:
///   F(x) = sum_{j != self} (1/b) perp(grad Psi_j).
/// Throws GuardError if x lies inside another vortex's level component
/// (the separation the interaction estimates need is gone).
Vec2 external_field(const Lake& lake, const std::vector<StreamField>& streams,
                    const std::vector<ComponentSet>& components, std::size_t self, Vec2 x);

}  // namespace lakevortex
