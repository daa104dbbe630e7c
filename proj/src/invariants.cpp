#include "mapruin/invariants.hpp"

#include "mapruin/kernel.hpp"
#include "mapruin/renewal.hpp"
#include "mapruin/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace mapruin {

namespace {

double rel_err(const Matrix& a, const Matrix& b) {
    const double scale = sup_norm(b);
    return sup_norm(Matrix(a - b)) / (scale > 0 ? scale : 1.0);
}

}  // namespace

std::vector<double> invariant_thetas(double bound, double alpha, int count) {
    const double top = std::isfinite(bound) ? bound : 2.0 * alpha;
    std::vector<double> out;
    for (int k = 1; k <= count; ++k) out.push_back(top * k / (count + 1.0));
    return out;
}

std::vector<InvariantCheck> run_invariants(const MapModel& model) {
    std::vector<InvariantCheck> out;
    auto add = [&](std::string name, double value, double tol) { out.push_back({std::move(name), value, tol}); };

    const KernelContext ctx(model);
    const LadderSolution& lad = ctx.ladder();
    const Partition& p = model.partition();
    add("ladder_residual", lad.residual, 1e-11);

    const MapModel dual = dual_model(model);
    const DescendingSolution dd = solve_descending(dual);
    add("dual_consistency", std::max(sup_norm(Matrix(dd.Q - lad.Qdual)), sup_norm(Matrix(dd.R - lad.Rdual))), 1e-9);

    if (!(lad.drift < 0)) return out;

    const RowVector pim = take(lad.pi, p.minus), pip = take(lad.pi, p.plus);
    add("pi_minus_K", sup_norm(Matrix(pim * lad.K)), 1e-10);
    add("pi_minus_L", p.n_plus() ? sup_norm(Matrix(pim * lad.L - pip)) : 0.0, 1e-10);
    add("K_kminus", sup_norm(Matrix(lad.K * lad.kminus)), 1e-10);

    const double alpha = decay_rate(model);
    const AsymptoticResult as = asymptotics(ctx, alpha);
    add("kappa_alpha", std::abs(as.point.kappa), 1e-12);

    double wh = 0.0, hq = 0.0;
    for (double th : invariant_thetas(theta_bound(ctx), alpha)) {
        wh = std::max(wh, wiener_hopf_residual(ctx, th));
        hq = std::max(hq, rel_err(H_hat_quadrature(ctx, th), H_hat(ctx, th)));
    }
    add("wiener_hopf", wh, 1e-9);
    add("H_hat_vs_quadrature", hq, 1e-6);
    add("Gbar_transform_vs_quadrature", rel_err(Gbar_transform_quadrature(ctx, alpha), Gbar_transform(ctx, alpha)), 1e-6);
    add("twisted_row_sums", (twisted_row_sums(ctx, as).array() - 1.0).abs().maxCoeff(), 1e-8);

    const Matrix hh = H_hat(ctx, alpha);
    add("nu_invariance", sup_norm(Matrix(as.nu * hh - as.nu)), 1e-9);
    add("h_invariance", sup_norm(Matrix(hh * as.point.h - as.point.h)), 1e-9);
    double nk = 0.0;
    for (int a = 0; a < p.n_minus(); ++a)
        nk += as.nu(p.minus[static_cast<std::size_t>(a)]) * lad.kminus(a) / -model.v()(p.minus[static_cast<std::size_t>(a)]);
    add("nu_kminus_alpha", std::abs(nk - alpha), 1e-9);
    add("prefactor_sum", sup_norm(Matrix(as.prefactor_full.rowwise().sum() - as.prefactor_total)), 1e-9);

    const FluidTail ft = fluid_tail(model);
    add("fluid_beta_residual", ft.beta_residual, 1e-10);
    const KernelContext dctx(dual);
    add("fluid_Q_vs_dual_ladder", sup_norm(Matrix(ft.Q - dual_ladder(dctx.ladder().pi, p, dctx.ladder().K, dctx.ladder().L).first)), 1e-9);
    return out;
}

}  // namespace mapruin
