#include "mapruin/kernel_tabulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mapruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Density at a grid point; at an atom location the two one-sided limits are averaged.
Matrix grid_density(const KernelContext& ctx, const std::vector<double>& atoms, double y) {
    const bool on_atom = std::any_of(atoms.begin(), atoms.end(), [&](double a) { return std::abs(a - y) <= 1e-12 * (1.0 + a); });
    if (!on_atom || y == 0.0) return H_density(ctx, y);
    return 0.5 * (H_density(ctx, std::nextafter(y, 0.0)) + H_density(ctx, std::nextafter(y, kInf)));
}

Matrix panel(const KernelContext& ctx, double step, int count, int k) {
    const double lo = k * step;
    return k < count ? ctx.tail().integral(lo, (k + 1) * step) : ctx.tail().integral(lo, kInf);
}

// upper[k] holds the panel integral over [x_k, x_{k+1}] (the last one runs to infinity);
// summing from the top turns it into int_{x_k}^inf W.
void accumulate(std::vector<Matrix>& upper, int count) {
    for (int k = count - 1; k >= 0; --k) upper[static_cast<std::size_t>(k)] += upper[static_cast<std::size_t>(k + 1)];
}

}  // namespace

KernelTable tabulate_kernel(const KernelContext& ctx, double step, int count) {
    KernelTable t;
    t.step = step;
    const auto n = static_cast<std::size_t>(count + 1);
    t.density.resize(n);
    t.gbar.resize(n);
    std::vector<Matrix> upper(n);
    const auto atoms = ctx.breaks();
#pragma omp parallel for schedule(dynamic, 8)
    for (int k = 0; k <= count; ++k) {
        t.density[static_cast<std::size_t>(k)] = grid_density(ctx, atoms, k * step);
        upper[static_cast<std::size_t>(k)] = panel(ctx, step, count, k);
    }
    accumulate(upper, count);
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= count; ++k)
        t.gbar[static_cast<std::size_t>(k)] = Gbar_from_tail(ctx, k * step, upper[static_cast<std::size_t>(k)]);
    return t;
}

KernelTable tabulate_kernel_serial(const KernelContext& ctx, double step, int count) {
    KernelTable t;
    t.step = step;
    const auto n = static_cast<std::size_t>(count + 1);
    t.density.resize(n);
    t.gbar.resize(n);
    std::vector<Matrix> upper(n);
    const auto atoms = ctx.breaks();
    for (int k = 0; k <= count; ++k) {
        t.density[static_cast<std::size_t>(k)] = grid_density(ctx, atoms, k * step);
        upper[static_cast<std::size_t>(k)] = panel(ctx, step, count, k);
    }
    accumulate(upper, count);
    for (int k = 0; k <= count; ++k)
        t.gbar[static_cast<std::size_t>(k)] = Gbar_from_tail(ctx, k * step, upper[static_cast<std::size_t>(k)]);
    return t;
}

}  // namespace mapruin
