#pragma once

#include "mapruin/kernel.hpp"
#include "mapruin/spectral.hpp"

#include <vector>

namespace mapruin {

/// Psi(x_k), x_k = k * step, from the Markov renewal equation.
struct HittingTable {
    double step = 0;
    std::vector<double> grid;
    std::vector<Matrix> psi;
    double kernel_cutoff = 0;  ///< level past which h was treated as zero
};

struct HittingOptions {
    bool parallel = true;  ///< OpenMP kernel tabulation
};

/// Trapezoidal march of Psi = Gbar + H * Psi. Throws BadGrid unless h > 0 and
/// xmax is a multiple of h.
HittingTable solve_hitting(const KernelContext& ctx, double xmax, double h, const HittingOptions& opt = {});

/// Step h <= 0.01 / alpha that divides xmax evenly.
double default_step(double xmax, double alpha);

/// P(tau_x^+ < inf) from the down-crossing (Palm) start: S- states weighted
/// by -v(i) pi(i).
double stationary_hit_probability(const MapModel& model, const Matrix& psi);

/// Max over common grid points of |Psi_h - Psi_{h/2}|.
double richardson_gap(const KernelContext& ctx, double xmax, double h);

struct AsymptoticResult {
    double alpha = 0;
    SpectralPoint point;  ///< Perron data at alpha
    RowVector nu;
    double eta_alpha = 0;
    double eta_zero = 0;
    Matrix prefactor_full;
    Vector prefactor_total;
    Matrix prefactor_continuous;  ///< n x |S+|
    Matrix gamma;                 ///< n x n, zero rows on S+
};

/// nu = -mu T(alpha)^{-1} Delta_v.
RowVector nu_vector(const KernelContext& ctx, const SpectralPoint& at_alpha);

AsymptoticResult asymptotics(const KernelContext& ctx);
AsymptoticResult asymptotics(const KernelContext& ctx, double alpha);

struct FluidTail {
    double alpha = 0;
    Vector coef;  ///< e^{alpha x} P(V > x, M = i) -> coef(i)
    Matrix Q;
    Matrix R;
    RowVector beta;
    double beta_residual = 0;
    double residual = 0;
};

FluidTail fluid_tail(const MapModel& model);

struct AsymptoteReport {
    double x_from = 0;
    double x_to = 0;
    double abs_dev = 0;   ///< max |e^{alpha x} Psi_ij(x) - prefactor_full_ij| over the last decade
    double rel_dev = 0;   ///< abs_dev / max |prefactor_full_ij|
    bool monotone = true; ///< deviation did not grow across the last decade
};

/// Throws HorizonTooShort unless the grid reaches 5 / alpha.
AsymptoteReport asymptote_match(const HittingTable& table, const AsymptoticResult& asym);

/// Row sums of the twisted kernel total mass, Delta_h^{-1} (int e^{alpha y} h(y) dy) h,
/// computed by quadrature of the density.
Vector twisted_row_sums(const KernelContext& ctx, const AsymptoticResult& asym);

}  // namespace mapruin
