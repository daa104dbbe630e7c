#include "mapruin/renewal.hpp"

#include "mapruin/error.hpp"
#include "mapruin/kernel_tabulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mapruin {

HittingTable solve_hitting(const KernelContext& ctx, double xmax, double h, const HittingOptions& opt) {
    if (!(h > 0) || !(xmax >= 0) || !std::isfinite(xmax))
        throw Error(ErrorCode::BadGrid, "grid needs h > 0 and finite xmax >= 0");
    const double ratio = xmax / h;
    const long long count = std::llround(ratio);
    if (std::abs(static_cast<double>(count) * h - xmax) > 1e-12 * std::max(1.0, xmax))
        throw Error(ErrorCode::BadGrid, "xmax=" + std::to_string(xmax) + " is not a multiple of h=" + std::to_string(h));
    if (count > 10'000'000) throw Error(ErrorCode::BadGrid, "grid has more than 1e7 points");
    const int N = static_cast<int>(count);

    const KernelTable kt = opt.parallel ? tabulate_kernel(ctx, h, N) : tabulate_kernel_serial(ctx, h, N);
    const int n = ctx.model().n();

    HittingTable t;
    t.step = h;
    t.kernel_cutoff = ctx.cutoff(0.0);
    const int reach = static_cast<int>(std::min<double>(N, std::ceil(t.kernel_cutoff / h)));
    t.grid.resize(static_cast<std::size_t>(N + 1));
    t.psi.resize(static_cast<std::size_t>(N + 1));
    for (int k = 0; k <= N; ++k) t.grid[static_cast<std::size_t>(k)] = k * h;

    auto hd = [&](int j) -> const Matrix& { return kt.density[static_cast<std::size_t>(j)]; };
    const Eigen::PartialPivLU<Matrix> step_lu(Matrix(Matrix::Identity(n, n) - 0.5 * h * hd(0)));
    t.psi[0] = kt.gbar[0];
    Matrix acc(n, n);
    for (int k = 1; k <= N; ++k) {
        acc.setZero();
        const int top = std::min(k - 1, reach);
        for (int j = 1; j <= top; ++j) acc.noalias() += hd(j) * t.psi[static_cast<std::size_t>(k - j)];
        if (k <= reach) acc.noalias() += 0.5 * hd(k) * t.psi[0];
        t.psi[static_cast<std::size_t>(k)] = step_lu.solve(Matrix(kt.gbar[static_cast<std::size_t>(k)] + h * acc));
    }
    return t;
}

double default_step(double xmax, double alpha) {
    const double target = 0.01 / alpha;
    const double cells = std::max(1.0, std::ceil(xmax / target - 1e-9));
    return xmax / cells;
}

double stationary_hit_probability(const MapModel& model, const Matrix& psi) {
    const RowVector pi = stationary_dist(model);
    double num = 0.0, den = 0.0;
    for (int i : model.partition().minus) {
        const double w = -model.v()(i) * pi(i);
        num += w * psi.row(i).sum();
        den += w;
    }
    return num / den;
}

double richardson_gap(const KernelContext& ctx, double xmax, double h) {
    const HittingTable coarse = solve_hitting(ctx, xmax, h);
    const HittingTable fine = solve_hitting(ctx, xmax, 0.5 * h);
    double gap = 0.0;
    for (std::size_t k = 0; k < coarse.psi.size(); ++k)
        gap = std::max(gap, sup_norm(Matrix(coarse.psi[k] - fine.psi[2 * k])));
    return gap;
}

RowVector nu_vector(const KernelContext& ctx, const SpectralPoint& at_alpha) {
    return -at_alpha.mu * T_inverse(ctx, at_alpha.theta) * ctx.model().v().asDiagonal();
}

AsymptoticResult asymptotics(const KernelContext& ctx) { return asymptotics(ctx, decay_rate(ctx.model())); }

AsymptoticResult asymptotics(const KernelContext& ctx, double alpha) {
    const MapModel& m = ctx.model();
    const Partition& p = ctx.partition();
    const LadderSolution& lad = ctx.ladder();
    if (!(lad.drift < 0))
        throw Error(ErrorCode::DriftNonNegative, "asymptotics need a negative mean drift");
    const int n = m.n(), nm = p.n_minus(), np = p.n_plus();

    AsymptoticResult r;
    r.alpha = alpha;
    r.point = perron(m, alpha, lad.kminus);
    r.nu = nu_vector(ctx, r.point);
    r.eta_alpha = kappa_prime(m, r.point);
    r.eta_zero = lad.drift;

    const Matrix Q = m.generator();
    Matrix E = Matrix::Zero(nm, n);
    for (int a = 0; a < nm; ++a) E(a, p.minus[static_cast<std::size_t>(a)]) = 1.0;
    for (int b = 0; b < np; ++b) E.col(p.plus[static_cast<std::size_t>(b)]) = lad.L.col(b);
    const Matrix kp = lad.kminus * take(lad.pi, p.minus);
    Matrix dv = m.D_mean();
    dv.diagonal() += m.v();
    const Matrix kinv = checked_inverse(Matrix(kp - lad.K), "k- pi- - K");
    const Matrix gminus =
        -kp * E * dv - (1.0 / alpha) * (alpha * Matrix::Identity(nm, nm) - kp) * kinv * E * Q;
    r.gamma = Matrix::Zero(n, n);
    for (int a = 0; a < nm; ++a) r.gamma.row(p.minus[static_cast<std::size_t>(a)]) = gminus.row(a);

    const Vector& h = r.point.h;
    const RowVector& mu = r.point.mu;
    r.prefactor_full = h * (mu * (r.gamma - Q / alpha)) / r.eta_alpha;

    double mu_k = 0.0;
    for (int a = 0; a < nm; ++a) mu_k += mu(p.minus[static_cast<std::size_t>(a)]) * lad.kminus(a);
    r.prefactor_total = -r.eta_zero * mu_k * h / r.eta_alpha;

    RowVector cont(np);
    const RowVector mu_minus = take(mu, p.minus);
    const RowVector through = mu_minus * lad.L;
    for (int b = 0; b < np; ++b) {
        const int j = p.plus[static_cast<std::size_t>(b)];
        cont(b) = (mu(j) - through(b)) * m.v()(j);
    }
    r.prefactor_continuous = h * cont / r.eta_alpha;
    return r;
}

FluidTail fluid_tail(const MapModel& model) {
    const LadderSolution lad = solve_ladder(model);
    if (!(lad.drift < 0)) throw Error(ErrorCode::DriftNonNegative, "fluid tail needs a negative mean drift");
    FluidTail f;
    f.alpha = decay_rate(model);
    const SpectralPoint pt = perron(model, f.alpha, lad.kminus);
    const DescendingSolution desc = solve_descending(model);
    f.Q = desc.Q;
    f.R = desc.R;
    f.residual = desc.residual;

    const Index m = f.Q.rows();
    Matrix a(m + 1, m);
    a.topRows(m) = f.Q.transpose();
    a.row(m).setOnes();
    Vector b = Vector::Zero(m + 1);
    b(m) = 1.0;
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    Vector beta = qr.solve(b);
    beta += qr.solve(Vector(b - a * beta));
    f.beta = beta.transpose();
    f.beta_residual = (f.beta * f.Q).cwiseAbs().maxCoeff();

    const double bh = f.beta.dot(take(pt.h, model.partition().minus));
    const double eta = kappa_prime(model, pt);
    f.coef = (-lad.drift * bh / eta) * pt.mu.transpose();
    return f;
}

AsymptoteReport asymptote_match(const HittingTable& table, const AsymptoticResult& asym) {
    if (table.grid.empty()) throw Error(ErrorCode::BadGrid, "empty hitting table");
    const double xmax = table.grid.back();
    if (xmax < 5.0 / asym.alpha)
        throw Error(ErrorCode::HorizonTooShort, "grid ends at " + std::to_string(xmax) + " < 5/alpha = " +
                                                    std::to_string(5.0 / asym.alpha));
    AsymptoteReport rep;
    rep.x_from = 0.9 * xmax;
    rep.x_to = xmax;
    double first = -1.0, last = 0.0;
    for (std::size_t k = 0; k < table.grid.size(); ++k) {
        const double x = table.grid[k];
        if (x < rep.x_from) continue;
        const double dev = sup_norm(Matrix(std::exp(asym.alpha * x) * table.psi[k] - asym.prefactor_full));
        if (first < 0) first = dev;
        last = dev;
        rep.abs_dev = std::max(rep.abs_dev, dev);
    }
    rep.rel_dev = rep.abs_dev / sup_norm(asym.prefactor_full);
    rep.monotone = last <= first + 1e-9;
    return rep;
}

Vector twisted_row_sums(const KernelContext& ctx, const AsymptoticResult& asym) {
    const Matrix hq = H_hat_quadrature(ctx, asym.alpha);
    return (hq * asym.point.h).cwiseQuotient(asym.point.h);
}

}  // namespace mapruin
