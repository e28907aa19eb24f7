#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "lakevortex/lake.hpp"

namespace lakevortex {

/// Which linear-algebra backend carries out a stream solve. Both must meet
/// the same residual contract (relative residual <= tol); PCG is the
/// reference method, Direct caches a sparse Cholesky factorization of the
/// immutable operator (plus one iterative-refinement pass) and exists for
/// wall-clock only. A Direct solve that misses the contract falls back to
/// PCG transparently.
enum class SolverBackend { PCG, Direct };

struct SolverOptions {
    double tol = 1e-10;        ///< relative residual target
    int max_iter_factor = 50;  ///< PCG iteration cap = factor * sqrt(n_cells)
    SolverBackend backend = SolverBackend::PCG;
};

struct SolveInfo {
    int iterations = 0;  ///< 0 for a pure direct solve
    double residual = 0.0;
    std::string backend;
};

/// Stream function on the lake grid (full nx*ny layout, zero on exterior
/// cells — the homogeneous Dirichlet ghost values are part of the data).
struct StreamField {
    std::vector<double> values;
    SolveInfo info;
};

/// Five-point finite-volume discretization of  div( (1/b) grad Psi )  on the
/// interior cells, with Psi = 0 at ghost/exterior cell centers. Face weights
/// are the harmonic mean of 1/b between the adjacent cells, i.e.
/// 2 / (b_i + b_j); at staircase faces the ghost cell mirrors the interior
/// coefficient. On beaches (alpha > 0) the coefficient is clamped in the
/// one-cell shore layer: b_eff = max(b, c * h^alpha).
class WeightedOperator {
public:
    const Lake* lake = nullptr;
    std::vector<double> b_eff;              ///< clamped depth, compact indexing
    std::vector<std::array<int, 4>> nbr;    ///< compact neighbour ids, -1 = ghost
    std::vector<std::array<double, 4>> w;   ///< face weights (W,E,S,N)
    std::vector<double> diag;               ///< negated diagonal of A (positive)

    /// out = A psi (compact vectors); A is symmetric negative definite.
    void apply(const std::vector<double>& psi, std::vector<double>& out) const;

    std::vector<double> to_compact(const std::vector<double>& grid) const;
    std::vector<double> to_grid(const std::vector<double>& compact_v) const;

    // Lazily built direct factorization (type-erased so Eigen stays inside
    // the .cpp); harmless to share because the operator is immutable.
    struct DirectCache;
    mutable std::shared_ptr<DirectCache> direct;
};

WeightedOperator assemble(const Lake& lake);

/// Solve A Psi = rhs for the stream function. `rhs_grid` is the cell-sampled
/// b*omega field in full-grid layout. Throws SolverError on non-convergence.
StreamField solve_stream(const WeightedOperator& op, const std::vector<double>& rhs_grid,
                         const SolverOptions& opts = {});

/// Grid Green function: response to a unit-mass single-cell delta (value
/// 1/h^2 at the cell center nearest y). Requires y at least 2h inside.
StreamField green_kernel(const WeightedOperator& op, Vec2 y, const SolverOptions& opts = {});

/// Pointwise remainder R(x,y) = G(x,y) - (1/2pi) sqrt(b(x) b(y)) ln|x-y| on
/// the grid. The singular cell (x = y's cell) is filled with the average of
/// its interior neighbours and reported separately.
struct RemainderField {
    std::vector<double> values;  ///< full grid
    int singular_cell = -1;      ///< flat id of the excluded cell
};
RemainderField remainder_kernel(const WeightedOperator& op, const StreamField& green, Vec2 y);

/// || A psi - rhs ||_2 / || rhs ||_2 over interior cells (plain vector norms;
/// absolute norm if rhs vanishes).
double residual_norm(const WeightedOperator& op, const StreamField& psi,
                     const std::vector<double>& rhs_grid);

/// Discrete energy  - sum Psi * rhs * h^2  (= the quadratic form of -A, so
/// nonnegative when rhs = A Psi).
double stream_energy(const WeightedOperator& op, const StreamField& psi,
                     const std::vector<double>& rhs_grid);

}  // namespace lakevortex
