#include "lakevortex/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lakevortex/errors.hpp"

namespace lakevortex {

namespace {

void validate(const RearrangementInstance& inst) {
    if (!(inst.M0 > 0.0) || !(inst.gamma > 0.0))
        throw ConfigError("rearrangement instance needs M0 > 0 and gamma > 0");
    if (inst.s.size() != inst.g.size() || inst.s.size() < 2)
        throw ConfigError("kernel needs at least two (s, g) samples");
    for (std::size_t k = 0; k < inst.s.size(); ++k) {
        if (k > 0 && !(inst.s[k] > inst.s[k - 1]))
            throw ConfigError("kernel radii must be strictly ascending");
        if (!std::isfinite(inst.g[k]) || inst.g[k] < 0.0)
            throw ConfigError("kernel samples must be finite and nonnegative");
        if (k > 0 && inst.g[k] > inst.g[k - 1] + 1e-12)
            throw ConfigError("kernel must be nonincreasing in s");
    }
    if (inst.s.front() < 0.0) throw ConfigError("kernel radii must be nonnegative");
}

}  // namespace

double kernel_value(const RearrangementInstance& inst, double r) {
    const auto& s = inst.s;
    const auto& g = inst.g;
    if (r <= s.front()) return g.front();   // flat cap below the first sample
    if (r >= s.back()) return 0.0;          // truncated
    const auto it = std::upper_bound(s.begin(), s.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - s.begin());
    const double f = (r - s[k - 1]) / (s[k] - s[k - 1]);
    return (1.0 - f) * g[k - 1] + f * g[k];
}

double rearrangement_bound(const RearrangementInstance& inst) {
    validate(inst);
    const double R0 = std::sqrt(inst.gamma / (M_PI * inst.M0));

    // integral of s * g(s) over [0, min(R0, s_last)], piecewise:
    //  - [0, s0]: g == g0 flat, exact  g0 s0^2 / 2
    //  - sample intervals: trapezoid on f(s) = s g(s), splitting at R0
    const auto& s = inst.s;
    const auto& g = inst.g;
    double integral = 0.0;
    const double cut = std::min(R0, s.back());
    const double lead = std::min(s.front(), cut);
    integral += g.front() * lead * lead / 2.0;
    for (std::size_t k = 0; k + 1 < s.size() && s[k] < cut; ++k) {
        const double a = s[k];
        const double b = std::min(s[k + 1], cut);
        const double ga = kernel_value(inst, a);
        const double gb = kernel_value(inst, b);
        integral += 0.5 * (a * ga + b * gb) * (b - a);
    }
    return 2.0 * M_PI * inst.M0 * integral;
}

BruteForceResult brute_force_sup(const RearrangementInstance& inst, Vec2 x, Vec2 dom0,
                                 Vec2 dom1, int m) {
    validate(inst);
    if (m < 2 || m > 64) throw ConfigError("brute-force grid size must be in [2, 64]");
    if (!(dom1.x > dom0.x) || !(dom1.y > dom0.y))
        throw ConfigError("brute-force domain corners must be ordered");

    BruteForceResult res;
    res.m = m;
    const double hx = (dom1.x - dom0.x) / m;
    const double hy = (dom1.y - dom0.y) / m;
    res.cell_area = hx * hy;
    res.kernel.resize(static_cast<std::size_t>(m) * m);
    res.density.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const Vec2 yc{dom0.x + (i + 0.5) * hx, dom0.y + (j + 0.5) * hy};
            res.kernel[static_cast<std::size_t>(j) * m + i] = kernel_value(inst, norm(yc - x));
        }

    // Greedy fill in decreasing kernel order is the exact optimum of this
    // finite LP (single budget constraint, box-bounded variables).
    std::vector<int> order(res.kernel.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return res.kernel[a] > res.kernel[b]; });
    double budget = inst.gamma;
    const double cell_mass = inst.M0 * res.cell_area;
    for (int id : order) {
        if (budget <= 0.0) break;
        const double take = std::min(cell_mass, budget);
        res.density[id] = take / res.cell_area;
        res.value += res.kernel[id] * take;
        if (take < cell_mass) ++res.partial_cells;
        budget -= take;
    }
    if (budget > 1e-12 * inst.gamma)
        throw ConfigError("brute-force domain too small to hold the mass budget");
    return res;
}

}  // namespace lakevortex
