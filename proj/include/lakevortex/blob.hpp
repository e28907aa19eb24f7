#pragma once

#include <string>
#include <vector>

#include "lakevortex/lake.hpp"

namespace lakevortex {

enum class BlobProfile { Uniform, Cosine };

/// Particle discretization of one concentrated vortex. Particles carry fixed
/// weights w_j (samples of the weighted vorticity b*omega times lattice
/// area); only positions evolve. The sign of gamma is the sign of every
/// weight.
struct Blob {
    std::vector<Vec2> pos;
    std::vector<double> w;  ///< immutable after construction
    double gamma = 0.0;     ///< signed circulation, sum of weights
    Vec2 z0;                ///< initial center
    double eps = 0.0;
    double M0 = 1.0;
    double spacing = 0.0;      ///< particle lattice pitch
    double omega_eps2 = 0.0;   ///< max |omega| * eps^2 at init (vorticity bound)
    BlobProfile profile = BlobProfile::Uniform;

    int count() const { return static_cast<int>(pos.size()); }
};

/// Lay a symmetric particle lattice (pitch min(h, M0*eps/8)) over the disc
/// B(z0, M0*eps), weight it by the requested profile, and normalize so the
/// weights sum to gamma exactly. Throws ConfigError when eps > eps0, the
/// disc is not safely inside the mask, fewer than 16 particles result, or
/// the profile violates the vorticity bound |omega| <= M0/eps^2.
Blob init_blob(const Lake& lake, Vec2 z0, double gamma, double eps, double M0,
               BlobProfile profile, double eps0 = 0.1);

/// Area-weighted (bilinear) deposition of particle weights onto cell
/// centers, divided by h^2: the cell-sampled b*omega field, full-grid
/// layout. Deposition conserves the weight sum exactly (partition of
/// unity). Throws GuardError if any particle's 4-cell stencil touches an
/// exterior cell.
std::vector<double> deposit(const Blob& blob, const Lake& lake);

/// Sum of particle weights in a fixed order; bit-identical across a run
/// because weights never change.
double total_circulation(const Blob& blob);

}  // namespace lakevortex
