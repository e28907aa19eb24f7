#include "lakevortex/blob.hpp"

#include <cmath>
#include <cstdio>

#include "lakevortex/errors.hpp"

namespace lakevortex {

Blob init_blob(const Lake& lake, Vec2 z0, double gamma, double eps, double M0,
               BlobProfile profile, double eps0) {
    if (!(eps > 0.0) || eps > eps0) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "blob scale eps=%g outside (0, eps0=%g]", eps, eps0);
        throw ConfigError(msg);
    }
    if (!(M0 > 0.0)) throw ConfigError("blob needs M0 > 0");
    if (gamma == 0.0) throw ConfigError("blob needs nonzero circulation");

    const double a = M0 * eps;  // support radius
    {
        int ci, cj;
        if (!lake.locate(z0, ci, cj) || !lake.interior[lake.flat(ci, cj)])
            throw ConfigError("blob center is not inside the lake");
        if (dist_boundary(lake, z0) < a + 2.0 * lake.h)
            throw ConfigError("blob support disc touches the mask boundary");
    }

    Blob blob;
    blob.z0 = z0;
    blob.eps = eps;
    blob.M0 = M0;
    blob.profile = profile;
    blob.spacing = std::min(lake.h, a / 8.0);

    // Symmetric lattice about z0: particle (i,j) sits at offsets
    // ((i+1/2) s, (j+1/2) s) for i,j in [-n, n), so the set is invariant
    // under reflection through z0 and the fresh centroid lands on z0.
    const double s = blob.spacing;
    const int n = static_cast<int>(std::ceil(a / s)) + 1;
    for (int j = -n; j < n; ++j) {
        for (int i = -n; i < n; ++i) {
            const Vec2 off{(i + 0.5) * s, (j + 0.5) * s};
            if (norm(off) > a) continue;
            blob.pos.push_back(z0 + off);
            double f = 1.0;
            if (profile == BlobProfile::Cosine)
                f = 0.5 * (1.0 + std::cos(M_PI * norm(off) / a));
            blob.w.push_back(f * s * s);
        }
    }
    if (blob.count() < 16) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "blob resolved by only %d particles (< 16)", blob.count());
        throw ConfigError(msg);
    }

    // Normalize to the requested circulation, then nudge the last weight so
    // the fixed-order sum equals gamma exactly (not just to rounding).
    double sum = 0.0;
    for (double wv : blob.w) sum += wv;
    const double scale = gamma / sum;
    for (double& wv : blob.w) wv *= scale;
    for (int pass = 0; pass < 8; ++pass) {
        double s2 = 0.0;
        for (double wv : blob.w) s2 += wv;
        const double corr = gamma - s2;
        if (corr == 0.0) break;
        blob.w.back() += corr;
    }
    blob.gamma = gamma;

    // Vorticity bound |omega| eps^2 <= M0 with omega = (b*omega)/b and
    // b*omega = w / s^2 at the particle.
    double om_max = 0.0;
    for (int k = 0; k < blob.count(); ++k) {
        const double bo = std::abs(blob.w[k]) / (s * s);
        om_max = std::max(om_max, bo / depth(lake, blob.pos[k]));
    }
    blob.omega_eps2 = om_max * eps * eps;
    if (blob.omega_eps2 > M0 * (1.0 + 1e-9)) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "profile violates the vorticity bound: max|omega| eps^2 = %.6g > M0 = %g",
                      blob.omega_eps2, M0);
        throw ConfigError(msg);
    }
    return blob;
}

std::vector<double> deposit(const Blob& blob, const Lake& lake) {
    std::vector<double> field(lake.nx * lake.ny, 0.0);
    const double inv_h2 = 1.0 / (lake.h * lake.h);
    for (int k = 0; k < blob.count(); ++k) {
        const Vec2 p = blob.pos[k];
        const double u = (p.x - lake.origin.x) / lake.h - 0.5;
        const double v = (p.y - lake.origin.y) / lake.h - 0.5;
        const int i0 = static_cast<int>(std::floor(u));
        const int j0 = static_cast<int>(std::floor(v));
        const double fx = u - i0, fy = v - j0;
        if (!lake.is_interior(i0, j0) || !lake.is_interior(i0 + 1, j0) ||
            !lake.is_interior(i0, j0 + 1) || !lake.is_interior(i0 + 1, j0 + 1)) {
            char msg[128];
            std::snprintf(msg, sizeof msg,
                          "particle %d at (%.6g, %.6g) escaped the interior mask", k, p.x, p.y);
            throw GuardError(msg);
        }
        const double wk = blob.w[k] * inv_h2;
        field[lake.flat(i0, j0)] += wk * (1 - fx) * (1 - fy);
        field[lake.flat(i0 + 1, j0)] += wk * fx * (1 - fy);
        field[lake.flat(i0, j0 + 1)] += wk * (1 - fx) * fy;
        field[lake.flat(i0 + 1, j0 + 1)] += wk * fx * fy;
    }
    return field;
}

double total_circulation(const Blob& blob) {
    double s = 0.0;
    for (double wv : blob.w) s += wv;
    return s;
}

}  // namespace lakevortex
