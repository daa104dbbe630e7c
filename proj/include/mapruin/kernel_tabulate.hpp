#pragma once

#include "mapruin/kernel.hpp"

#include <vector>

namespace mapruin {

/// h(y) and Gbar(x) on the uniform grid x_k = k * step, k = 0..count.
struct KernelTable {
    double step = 0;
    std::vector<Matrix> density;
    std::vector<Matrix> gbar;
};

/// OpenMP over grid points.
KernelTable tabulate_kernel(const KernelContext& ctx, double step, int count);

/// Single-threaded reference; produces the same table bit for bit.
KernelTable tabulate_kernel_serial(const KernelContext& ctx, double step, int count);

}  // namespace mapruin
