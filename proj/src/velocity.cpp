#include "lakevortex/velocity.hpp"

#include <cmath>

#include "lakevortex/errors.hpp"

namespace lakevortex {

namespace {

/// Centered-difference gradient of the stream field at cell (i,j); exterior
/// neighbours contribute their Dirichlet ghost value 0, which is what the
/// full-grid layout already stores.
Vec2 cell_gradient(const Lake& lake, const std::vector<double>& psi, int i, int j) {
    const double inv2h = 0.5 / lake.h;
    return {(psi[lake.flat(i + 1, j)] - psi[lake.flat(i - 1, j)]) * inv2h,
            (psi[lake.flat(i, j + 1)] - psi[lake.flat(i, j - 1)]) * inv2h};
}

Vec2 grid_gradient(const Lake& lake, const std::vector<double>& psi, Vec2 x) {
    const double u = (x.x - lake.origin.x) / lake.h - 0.5;
    const double v = (x.y - lake.origin.y) / lake.h - 0.5;
    const int i0 = static_cast<int>(std::floor(u));
    const int j0 = static_cast<int>(std::floor(v));
    const double fx = u - i0, fy = v - j0;
    if (!lake.is_interior(i0, j0) || !lake.is_interior(i0 + 1, j0) ||
        !lake.is_interior(i0, j0 + 1) || !lake.is_interior(i0 + 1, j0 + 1))
        throw GuardError("velocity query too close to the shore for the gradient stencil");
    const Vec2 g00 = cell_gradient(lake, psi, i0, j0);
    const Vec2 g10 = cell_gradient(lake, psi, i0 + 1, j0);
    const Vec2 g01 = cell_gradient(lake, psi, i0, j0 + 1);
    const Vec2 g11 = cell_gradient(lake, psi, i0 + 1, j0 + 1);
    return (1 - fx) * (1 - fy) * g00 + fx * (1 - fy) * g10 + (1 - fx) * fy * g01 + fx * fy * g11;
}

constexpr int kChunk = 1024;  // fixed-size chunked reduction, bit-reproducible

}  // namespace

Vec2 velocity_from_stream(const Lake& lake, const StreamField& psi, Vec2 x) {
    const Vec2 g = grid_gradient(lake, psi.values, x);
    return perp(g) / depth(lake, x);
}

Vec2 v_K(const Lake& lake, const Blob& blob, Vec2 x, double delta) {
    const double bx = depth(lake, x);
    const double d2 = delta * delta;
    const int n = blob.count();
    Vec2 total{0.0, 0.0};
    for (int c0 = 0; c0 < n; c0 += kChunk) {
        const int c1 = std::min(n, c0 + kChunk);
        Vec2 part{0.0, 0.0};
        for (int k = c0; k < c1; ++k) {
            const Vec2 d = x - blob.pos[k];
            const double r2 = norm2(d) + d2;
            const double bk = depth(lake, blob.pos[k]);
            part += (std::sqrt(bx * bk) * blob.w[k] / r2) * perp(d);
        }
        total += part;
    }
    return total / (2.0 * M_PI * bx);
}

PsiVL psi_log_and_vL(const Lake& lake, const Blob& blob, Vec2 x, double delta) {
    const double bx = depth(lake, x);
    const int n = blob.count();
    double psi = 0.0;
    for (int c0 = 0; c0 < n; c0 += kChunk) {
        const int c1 = std::min(n, c0 + kChunk);
        double part = 0.0;
        for (int k = c0; k < c1; ++k) {
            const double r = std::max(norm(x - blob.pos[k]), delta);
            const double bk = depth(lake, blob.pos[k]);
            part += std::log(r) * std::sqrt(bx * bk) * blob.w[k];
        }
        psi += part;
    }
    PsiVL out;
    out.psi = psi;
    out.vL = (psi / (4.0 * M_PI * bx * bx)) * perp(grad_depth(lake, x));
    return out;
}

VelocitySample velocity_sample(const Lake& lake, const StreamField& psi, const Blob& blob,
                               Vec2 x, double delta) {
    VelocitySample s;
    s.v = velocity_from_stream(lake, psi, x);
    s.vK = v_K(lake, blob, x, delta);
    const PsiVL pl = psi_log_and_vL(lake, blob, x, delta);
    s.psi = pl.psi;
    s.vL = pl.vL;
    s.vR = s.v - s.vK - s.vL;
    return s;
}

Vec2 external_field(const Lake& lake, const std::vector<StreamField>& streams,
                    const std::vector<ComponentSet>& components, std::size_t self, Vec2 x) {
    int ci, cj;
    if (!lake.locate(x, ci, cj))
        throw GuardError("external field query left the grid");
    const int id = lake.flat(ci, cj);
    Vec2 f{0.0, 0.0};
    for (std::size_t j = 0; j < streams.size(); ++j) {
        if (j == self) continue;
        if (j < components.size() && !components[j].member.empty() &&
            components[j].contains_cell(id))
            throw GuardError("external field evaluated inside another vortex's neighbourhood");
        f += grid_gradient(lake, streams[j].values, x);
    }
    return perp(f) / depth(lake, x);
}

}  // namespace lakevortex
