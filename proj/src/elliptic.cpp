#include "lakevortex/elliptic.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <array>
#include <cmath>
#include <cstdio>

#include "lakevortex/errors.hpp"

namespace lakevortex {

struct WeightedOperator::DirectCache {
    Eigen::SparseMatrix<double> M;  // -A, SPD
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool ok = false;
};

void WeightedOperator::apply(const std::vector<double>& psi, std::vector<double>& out) const {
    const int n = static_cast<int>(psi.size());
    out.resize(n);
    const double inv_h2 = 1.0 / (lake->h * lake->h);
    for (int k = 0; k < n; ++k) {
        double acc = -diag[k] * psi[k];
        const auto& nb = nbr[k];
        const auto& wk = w[k];
        for (int f = 0; f < 4; ++f)
            if (nb[f] >= 0) acc += wk[f] * psi[nb[f]];
        out[k] = acc * inv_h2;
    }
}

std::vector<double> WeightedOperator::to_compact(const std::vector<double>& grid) const {
    std::vector<double> v(lake->n_cells());
    for (int k = 0; k < lake->n_cells(); ++k) v[k] = grid[lake->cell_of[k]];
    return v;
}

std::vector<double> WeightedOperator::to_grid(const std::vector<double>& compact_v) const {
    std::vector<double> g(lake->nx * lake->ny, 0.0);
    for (int k = 0; k < lake->n_cells(); ++k) g[lake->cell_of[k]] = compact_v[k];
    return g;
}

WeightedOperator assemble(const Lake& lake) {
    WeightedOperator op;
    op.lake = &lake;
    const int n = lake.n_cells();
    op.b_eff.resize(n);
    op.nbr.resize(n);
    op.w.resize(n);
    op.diag.assign(n, 0.0);

    // Shore clamp: 1/b <- min(1/b, 1/(c h^alpha)), i.e. b_eff = max(b, c h^alpha).
    // A no-op when alpha = 0 (then c h^0 = c = b).
    const double h_alpha = std::pow(lake.h, lake.form.alpha);
    for (int k = 0; k < n; ++k) {
        const int id = lake.cell_of[k];
        const Vec2 c = lake.cell_center(id % lake.nx, id / lake.nx);
        const double clamp_level = lake.form.c.eval(c) * h_alpha;
        op.b_eff[k] = std::max(lake.b[id], clamp_level);
    }

    for (int k = 0; k < n; ++k) {
        const int id = lake.cell_of[k];
        const int i = id % lake.nx, j = id / lake.nx;
        const int di[4] = {-1, 1, 0, 0};
        const int dj[4] = {0, 0, -1, 1};
        for (int f = 0; f < 4; ++f) {
            const int ii = i + di[f], jj = j + dj[f];
            if (lake.is_interior(ii, jj)) {
                const int kn = lake.compact[lake.flat(ii, jj)];
                op.nbr[k][f] = kn;
                op.w[k][f] = 2.0 / (op.b_eff[k] + op.b_eff[kn]);
            } else {
                // ghost mirrors the interior coefficient; Psi_ghost = 0
                op.nbr[k][f] = -1;
                op.w[k][f] = 1.0 / op.b_eff[k];
            }
            op.diag[k] += op.w[k][f];
        }
    }
    return op;
}

namespace {

double dot_v(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_v(const std::vector<double>& a) { return std::sqrt(dot_v(a, a)); }

/// Diagonally preconditioned conjugate gradient on  (-A) x = rhs_neg.
/// Deterministic: fixed summation order, no reordering.
SolveInfo pcg(const WeightedOperator& op, const std::vector<double>& rhs_neg,
              std::vector<double>& x, double tol, int max_iter) {
    const int n = static_cast<int>(rhs_neg.size());
    const double inv_h2 = 1.0 / (op.lake->h * op.lake->h);
    const double rhs_norm = norm_v(rhs_neg);
    SolveInfo info;
    info.backend = "pcg";
    if (rhs_norm == 0.0) {
        x.assign(n, 0.0);
        return info;
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    op.apply(x, q);  // q = A x
    for (int k = 0; k < n; ++k) r[k] = rhs_neg[k] + q[k];  // r = rhs_neg - (-A)x
    for (int k = 0; k < n; ++k) z[k] = r[k] / (op.diag[k] * inv_h2);
    p = z;
    double rz = dot_v(r, z);
    double rnorm = norm_v(r);

    int it = 0;
    while (rnorm > tol * rhs_norm && it < max_iter) {
        op.apply(p, q);
        for (int k = 0; k < n; ++k) q[k] = -q[k];  // q = (-A) p
        const double alpha = rz / dot_v(p, q);
        for (int k = 0; k < n; ++k) x[k] += alpha * p[k];
        for (int k = 0; k < n; ++k) r[k] -= alpha * q[k];
        for (int k = 0; k < n; ++k) z[k] = r[k] / (op.diag[k] * inv_h2);
        const double rz_new = dot_v(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
        rnorm = norm_v(r);
        ++it;
    }
    info.iterations = it;
    info.residual = rnorm / rhs_norm;
    if (rnorm > tol * rhs_norm) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "PCG did not converge: rel residual %.3e after %d iterations", info.residual,
                      it);
        throw SolverError(msg);
    }
    return info;
}

void build_direct(const WeightedOperator& op) {
    auto cache = std::make_shared<WeightedOperator::DirectCache>();
    const int n = static_cast<int>(op.diag.size());
    const double inv_h2 = 1.0 / (op.lake->h * op.lake->h);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    for (int k = 0; k < n; ++k) {
        trip.emplace_back(k, k, op.diag[k] * inv_h2);
        for (int f = 0; f < 4; ++f)
            if (op.nbr[k][f] >= 0) trip.emplace_back(k, op.nbr[k][f], -op.w[k][f] * inv_h2);
    }
    cache->M.resize(n, n);
    cache->M.setFromTriplets(trip.begin(), trip.end());
    cache->ldlt.compute(cache->M);
    cache->ok = (cache->ldlt.info() == Eigen::Success);
    op.direct = std::move(cache);
}

}  // namespace

StreamField solve_stream(const WeightedOperator& op, const std::vector<double>& rhs_grid,
                         const SolverOptions& opts) {
    const int n = op.lake->n_cells();
    std::vector<double> rhs = op.to_compact(rhs_grid);
    std::vector<double> rhs_neg(rhs.size());
    for (int k = 0; k < n; ++k) rhs_neg[k] = -rhs[k];

    std::vector<double> x(n, 0.0);
    SolveInfo info;
    const int max_iter = static_cast<int>(opts.max_iter_factor * std::sqrt(double(n))) + 10;

    bool solved = false;
    if (opts.backend == SolverBackend::Direct) {
        if (!op.direct) build_direct(op);
        if (op.direct->ok) {
            const double rhs_norm = norm_v(rhs_neg);
            Eigen::Map<const Eigen::VectorXd> bvec(rhs_neg.data(), n);
            Eigen::VectorXd xv = op.direct->ldlt.solve(bvec);
            // one iterative-refinement pass
            Eigen::VectorXd res = bvec - op.direct->M * xv;
            xv += op.direct->ldlt.solve(res);
            res = bvec - op.direct->M * xv;
            const double rel = rhs_norm > 0.0 ? res.norm() / rhs_norm : res.norm();
            if (rel <= opts.tol) {
                for (int k = 0; k < n; ++k) x[k] = xv[k];
                info.backend = "direct";
                info.iterations = 0;
                info.residual = rel;
                solved = true;
            } else {
                // fall back to PCG, warm-started from the direct solution
                for (int k = 0; k < n; ++k) x[k] = xv[k];
            }
        }
    }
    if (!solved) info = pcg(op, rhs_neg, x, opts.tol, max_iter);

    StreamField out;
    out.values = op.to_grid(x);
    out.info = info;
    return out;
}

StreamField green_kernel(const WeightedOperator& op, Vec2 y, const SolverOptions& opts) {
    const Lake& lake = *op.lake;
    int ci, cj;
    if (!lake.locate(y, ci, cj) || !lake.interior[lake.flat(ci, cj)])
        throw GuardError("green_kernel source must be inside the lake");
    if (dist_boundary(lake, y) < 2.0 * lake.h)
        throw GuardError("green_kernel source must be at least 2h from the shore");
    // snap to the nearest cell center (round down on exact ties)
    const double u = (y.x - lake.origin.x) / lake.h - 0.5;
    const double v = (y.y - lake.origin.y) / lake.h - 0.5;
    int si = static_cast<int>(std::lround(u));
    int sj = static_cast<int>(std::lround(v));
    if (!lake.is_interior(si, sj)) {
        si = ci;
        sj = cj;
    }
    std::vector<double> rhs(lake.nx * lake.ny, 0.0);
    rhs[lake.flat(si, sj)] = 1.0 / (lake.h * lake.h);
    return solve_stream(op, rhs, opts);
}

RemainderField remainder_kernel(const WeightedOperator& op, const StreamField& green, Vec2 y) {
    const Lake& lake = *op.lake;
    RemainderField rem;
    rem.values.assign(lake.nx * lake.ny, 0.0);
    const double by = depth(lake, y);
    const double u = (y.x - lake.origin.x) / lake.h - 0.5;
    const double v = (y.y - lake.origin.y) / lake.h - 0.5;
    const int si = static_cast<int>(std::lround(u));
    const int sj = static_cast<int>(std::lround(v));
    rem.singular_cell = lake.flat(si, sj);

    const double two_pi = 2.0 * M_PI;
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int id = lake.cell_of[k];
        if (id == rem.singular_cell) continue;
        const Vec2 xc = lake.cell_center(id % lake.nx, id / lake.nx);
        const double r = norm(xc - y);
        rem.values[id] =
            green.values[id] - std::sqrt(lake.b[id] * by) * std::log(r) / two_pi;
    }
    // fill the excluded cell with the neighbour average so exported fields
    // stay finite everywhere
    double acc = 0.0;
    int cnt = 0;
    const int i = rem.singular_cell % lake.nx, j = rem.singular_cell / lake.nx;
    const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
    for (int f = 0; f < 4; ++f)
        if (lake.is_interior(i + di[f], j + dj[f])) {
            acc += rem.values[lake.flat(i + di[f], j + dj[f])];
            ++cnt;
        }
    if (cnt > 0) rem.values[rem.singular_cell] = acc / cnt;
    return rem;
}

double residual_norm(const WeightedOperator& op, const StreamField& psi,
                     const std::vector<double>& rhs_grid) {
    std::vector<double> x = op.to_compact(psi.values);
    std::vector<double> rhs = op.to_compact(rhs_grid);
    std::vector<double> ax;
    op.apply(x, ax);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < ax.size(); ++k) {
        const double d = ax[k] - rhs[k];
        num += d * d;
        den += rhs[k] * rhs[k];
    }
    num = std::sqrt(num);
    den = std::sqrt(den);
    return den > 0.0 ? num / den : num;
}

double stream_energy(const WeightedOperator& op, const StreamField& psi,
                     const std::vector<double>& rhs_grid) {
    const Lake& lake = *op.lake;
    const double h2 = lake.h * lake.h;
    double e = 0.0;
    for (int k = 0; k < lake.n_cells(); ++k) {
        const int id = lake.cell_of[k];
        e -= psi.values[id] * rhs_grid[id];
    }
    return e * h2;
}

}  // namespace lakevortex
