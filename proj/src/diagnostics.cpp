#include "lakevortex/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "lakevortex/errors.hpp"

namespace lakevortex {

Vec2 center(const Blob& blob) {
    if (blob.gamma == 0.0) throw ConfigError("center undefined for zero circulation");
    Vec2 acc{0.0, 0.0};
    for (int k = 0; k < blob.count(); ++k) acc += blob.w[k] * blob.pos[k];
    return acc / blob.gamma;
}

double inertia(const Blob& blob, Vec2 z) {
    double acc = 0.0;
    for (int k = 0; k < blob.count(); ++k) acc += std::abs(blob.w[k]) * norm2(blob.pos[k] - z);
    return acc;
}

double transverse_moment(const Blob& blob, const Lake& lake, double b0) {
    double acc = 0.0;
    for (int k = 0; k < blob.count(); ++k) {
        const double d = depth(lake, blob.pos[k]) - b0;
        acc += std::abs(blob.w[k]) * d * d;
    }
    return acc;
}

double depth_moment(const Blob& blob, const Lake& lake, int k) {
    double acc = 0.0;
    for (int j = 0; j < blob.count(); ++j) {
        const double b = depth(lake, blob.pos[j]);
        double bk = 1.0;
        for (int p = 0; p < k; ++p) bk *= b;
        acc += blob.w[j] * bk;
    }
    return acc;
}

double mass_outside(const Blob& blob, Vec2 z, double R) {
    const double R2 = R * R;
    double acc = 0.0;
    for (int k = 0; k < blob.count(); ++k)
        if (norm2(blob.pos[k] - z) > R2) acc += std::abs(blob.w[k]);
    return acc;
}

double psi_self_moment(const Lake& lake, const Blob& blob, double delta) {
    // sum_j w_j psi(x_j) with psi(x) = sum_k ln(max(|x-x_k|, delta))
    // sqrt(b(x) b(x_k)) w_k; self pairs are mollified by delta.
    const int n = blob.count();
    std::vector<double> sqb(n);
    for (int k = 0; k < n; ++k) sqb[k] = std::sqrt(depth(lake, blob.pos[k]));
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        double psi_j = 0.0;
        for (int k = 0; k < n; ++k) {
            const double r = std::max(norm(blob.pos[j] - blob.pos[k]), delta);
            psi_j += std::log(r) * sqb[k] * blob.w[k];
        }
        acc += blob.w[j] * sqb[j] * psi_j;
    }
    return acc;
}

double blob_min_phi(const Lake& lake, const Blob& blob) {
    double mn = std::numeric_limits<double>::infinity();
    for (int k = 0; k < blob.count(); ++k)
        mn = std::min(mn, lake.form.phi.eval(blob.pos[k]));
    return mn;
}

TransverseSupport transverse_support(const Blob& blob, const Lake& lake, double b0,
                                     double h_ladder0) {
    TransverseSupport ts;
    std::array<double, kMassLadder> h{};
    for (int r = 0; r < kMassLadder; ++r) h[r] = h_ladder0 / static_cast<double>(1 << r);
    for (int k = 0; k < blob.count(); ++k) {
        const double d = std::abs(depth(lake, blob.pos[k]) - b0);
        ts.R_t = std::max(ts.R_t, d);
        const double aw = std::abs(blob.w[k]);
        for (int r = 0; r < kMassLadder; ++r)
            if (d > h[r]) ts.m_t[r] += aw;
    }
    return ts;
}

LpNorms deposited_lp_norms(const Lake& lake, const std::vector<double>& b_omega) {
    const double h2 = lake.h * lake.h;
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int id = lake.cell_of[k];
        const double bo = b_omega[id];
        s1 += std::abs(bo);
        s2 += bo * bo / lake.b[id];
    }
    LpNorms out;
    out.l1 = s1 * h2;
    out.l2 = std::sqrt(s2 * h2);
    return out;
}

double weak_localization_radius(double eps) {
    const double L = std::abs(std::log(eps));
    return std::sqrt(std::log(L) / L);
}

DiagnosticsRecord sample_diagnostics(const Lake& lake, const WeightedOperator& op,
                                     const Blob& blob, double t, double b0, double eps,
                                     double h_ladder0, double delta, const SolverOptions& opts) {
    DiagnosticsRecord rec;
    rec.t = t;
    rec.z = center(blob);
    rec.I = inertia(blob, rec.z);
    rec.K = transverse_moment(blob, lake, b0);
    rec.J1 = depth_moment(blob, lake, 1);
    rec.J2 = depth_moment(blob, lake, 2);
    rec.J4 = depth_moment(blob, lake, 4);
    rec.psi_moment = psi_self_moment(lake, blob, delta);
    rec.R_used = weak_localization_radius(eps);
    rec.mass_out = mass_outside(blob, rec.z, rec.R_used);
    const TransverseSupport ts = transverse_support(blob, lake, b0, h_ladder0);
    rec.R_t = ts.R_t;
    rec.m_t = ts.m_t;
    rec.h_ladder0 = h_ladder0;
    rec.min_phi = blob_min_phi(lake, blob);

    const std::vector<double> rhs = deposit(blob, lake);
    const StreamField psi = solve_stream(op, rhs, opts);
    rec.E = stream_energy(op, psi, rhs);
    const LpNorms lp = deposited_lp_norms(lake, rhs);
    rec.lp1 = lp.l1;
    rec.lp2 = lp.l2;
    return rec;
}

}  // namespace lakevortex
