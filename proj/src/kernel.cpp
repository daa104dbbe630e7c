#include "mapruin/kernel.hpp"

#include "mapruin/error.hpp"
#include "mapruin/quadrature.hpp"
#include "mapruin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mapruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix ladder_E(const Partition& p, const Matrix& L) {
    Matrix e = Matrix::Zero(p.n_minus(), p.n_minus() + p.n_plus());
    for (int a = 0; a < p.n_minus(); ++a) e(a, p.minus[static_cast<std::size_t>(a)]) = 1.0;
    for (int b = 0; b < p.n_plus(); ++b) e.col(p.plus[static_cast<std::size_t>(b)]) = L.col(b);
    return e;
}

// Scatter a block-ordered matrix (S- then S+) back to original indexing.
Matrix unblock(const Partition& p, const Matrix& blk) {
    std::vector<int> ord(p.minus);
    ord.insert(ord.end(), p.plus.begin(), p.plus.end());
    const Index n = blk.rows();
    Matrix out(n, n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) out(ord[static_cast<std::size_t>(r)], ord[static_cast<std::size_t>(c)]) = blk(r, c);
    return out;
}

}  // namespace

KernelContext::KernelContext(MapModel model, const LadderOptions& opt)
    : model_(std::move(model)), ladder_(solve_ladder(model_, opt)), tail_(model_, ladder_.K, ladder_.L) {
    prepare();
}

KernelContext::KernelContext(MapModel model, LadderSolution ladder)
    : model_(std::move(model)), ladder_(std::move(ladder)), tail_(model_, ladder_.K, ladder_.L) {
    prepare();
}

void KernelContext::prepare() {
    const Partition& p = model_.partition();
    envelope_ = model_.jump_abscissa();
    for (int k : p.plus) envelope_ = std::min(envelope_, sojourn_rate(k));

    const int m = p.n_minus(), n = model_.n();
    const Matrix& K = ladder_.K;
    const Matrix E = ladder_E(p, ladder_.L);
    const Matrix id = Matrix::Identity(m, m);
    // int_0^y e^{uK} du integrated against F(dy)
    const bool null_K = ladder_.kminus.size() > 0;
    Matrix kp, kp_inv, k_inv;
    if (null_K) {
        kp = ladder_.kminus * take(ladder_.pi, p.minus);
        kp_inv = checked_inverse(Matrix(kp - K), "k- pi- - K");
    } else {
        k_inv = checked_inverse(K, "K");
    }
    tail_total_ = Matrix::Zero(m, n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (const auto* f = model_.jump(k, j)) {
                const Matrix fh = f->matrix_mgf(K);
                const Matrix phi = null_K ? Matrix(kp_inv * (f->mean() * kp - fh + id)) : Matrix(k_inv * (fh - id));
                tail_total_.col(j) += model_.D()(k, j) * (phi * E.col(k));
            }
}

double KernelContext::g(int k, int j, double y, double log_scale) const {
    if (y < 0) return 0.0;
    const double a = sojourn_rate(k);
    double out = k != j ? model_.C()(k, j) * std::exp(log_scale - a * y) : 0.0;
    if (const auto* f = model_.jump(k, j)) out += model_.D()(k, j) * f->smoothed(y, a, log_scale);
    return out;
}

double KernelContext::g_bar(int k, int j, double x, double log_scale) const {
    const auto* f = model_.jump(k, j);
    return f ? model_.D()(k, j) * f->smoothed_tail(x, sojourn_rate(k), log_scale) : 0.0;
}

double KernelContext::u_cdf(int k, int j, double x) const {
    if (x < 0) return 0.0;
    double out = k != j ? model_.C()(k, j) : 0.0;
    if (const auto* f = model_.jump(k, j)) out += model_.D()(k, j) * f->cdf(x);
    return out;
}

double KernelContext::cutoff(double theta, double eps) const {
    const double atoms = model_.max_atom();
    if (!std::isfinite(envelope_)) return atoms;
    const double q = envelope_ - theta;
    if (!(q > 0)) throw Error(ErrorCode::DomainExceeded, "theta reaches the kernel decay envelope");
    return atoms + quad::envelope_cutoff(q, model_.max_shape() + 1, eps);
}

std::vector<double> KernelContext::breaks() const { return model_.atom_locations(); }

Matrix H_density(const KernelContext& ctx, double y, double theta) {
    const double ls = theta * y;
    const MapModel& m = ctx.model();
    const Partition& p = ctx.partition();
    const int n = m.n();
    Matrix h = Matrix::Zero(n, n);
    for (int i : p.plus)
        for (int j = 0; j < n; ++j) h(i, j) = ctx.g(i, j, y, ls) / m.v()(i);
    const Matrix w = ctx.tail().at(y, ls);
    for (int a = 0; a < p.n_minus(); ++a) {
        const int i = p.minus[static_cast<std::size_t>(a)];
        for (int j = 0; j < n; ++j) {
            double s = w(a, j);
            for (int b = 0; b < p.n_plus(); ++b)
                s += ctx.ladder().L(a, b) * ctx.g(p.plus[static_cast<std::size_t>(b)], j, y, ls);
            h(i, j) = s / -m.v()(i);
        }
    }
    return h;
}

Matrix H_at(const KernelContext& ctx, double x) {
    const MapModel& m = ctx.model();
    const Partition& p = ctx.partition();
    const int n = m.n();
    Matrix out = Matrix::Zero(n, n);
    if (!(x > 0)) return out;
    auto smooth_cdf = [&](int k, int j) { return (ctx.u_cdf(k, j, x) - ctx.g(k, j, x)) / ctx.sojourn_rate(k); };
    for (int i : p.plus)
        for (int j = 0; j < n; ++j) out(i, j) = smooth_cdf(i, j) / m.v()(i);
    const Matrix w = ctx.tail().integral(0.0, x);
    for (int a = 0; a < p.n_minus(); ++a) {
        const int i = p.minus[static_cast<std::size_t>(a)];
        for (int j = 0; j < n; ++j) {
            double s = w(a, j);
            for (int b = 0; b < p.n_plus(); ++b) s += ctx.ladder().L(a, b) * smooth_cdf(p.plus[static_cast<std::size_t>(b)], j);
            out(i, j) = s / -m.v()(i);
        }
    }
    return out;
}

Matrix H_total(const KernelContext& ctx) {
    const MapModel& m = ctx.model();
    const Partition& p = ctx.partition();
    const int n = m.n();
    Matrix out = Matrix::Zero(n, n);
    for (int i : p.plus)
        for (int j = 0; j < n; ++j) out(i, j) = m.u_mass(i, j) / m.c(i);
    for (int a = 0; a < p.n_minus(); ++a) {
        const int i = p.minus[static_cast<std::size_t>(a)];
        for (int j = 0; j < n; ++j) {
            double s = ctx.tail_total()(a, j);
            for (int b = 0; b < p.n_plus(); ++b) {
                const int k = p.plus[static_cast<std::size_t>(b)];
                s += ctx.ladder().L(a, b) * m.u_mass(k, j) / ctx.sojourn_rate(k);
            }
            out(i, j) = s / -m.v()(i);
        }
    }
    return out;
}

Matrix Gbar_from_tail(const KernelContext& ctx, double x, const Matrix& w_upper, double theta) {
    const double ls = theta * x;
    const MapModel& m = ctx.model();
    const Partition& p = ctx.partition();
    const int n = m.n();
    Matrix out = Matrix::Zero(n, n);
    for (int i : p.plus) {
        out(i, i) = std::exp(ls - ctx.sojourn_rate(i) * x);
        for (int j = 0; j < n; ++j) out(i, j) += ctx.g_bar(i, j, x, ls) / m.v()(i);
    }
    for (int a = 0; a < p.n_minus(); ++a) {
        const int i = p.minus[static_cast<std::size_t>(a)];
        for (int j = 0; j < n; ++j) {
            double s = w_upper(a, j);
            for (int b = 0; b < p.n_plus(); ++b) {
                const int k = p.plus[static_cast<std::size_t>(b)];
                double t = ctx.g_bar(k, j, x, ls);
                if (k == j) t += m.v()(k) * std::exp(ls - ctx.sojourn_rate(k) * x);
                s += ctx.ladder().L(a, b) * t;
            }
            out(i, j) = s / -m.v()(i);
        }
    }
    return out;
}

Matrix Gbar_at(const KernelContext& ctx, double x) {
    x = std::max(0.0, x);
    return Gbar_from_tail(ctx, x, ctx.tail().integral(x, kInf));
}

double theta_bound(const KernelContext& ctx) {
    double b = theta_max(ctx.model());
    for (int k : ctx.partition().plus) b = std::min(b, ctx.sojourn_rate(k));
    return b;
}

namespace {

void check_theta(const KernelContext& ctx, double theta) {
    const double b = theta_bound(ctx);
    if (!(theta >= 0 && theta < b))
        throw Error(ErrorCode::DomainExceeded,
                    "theta=" + std::to_string(theta) + " outside the admissible range [0, " + std::to_string(b) + ")");
}

struct Blocks {
    Matrix rinv;   // (theta I - K)^{-1}
    Vector vplus;  // v over S+
    Vector cplus;  // c - theta v over S+
};

Blocks blocks(const KernelContext& ctx, double theta) {
    const MapModel& m = ctx.model();
    const Partition& p = ctx.partition();
    const int nm = p.n_minus();
    Blocks b;
    b.rinv = checked_inverse(Matrix(theta * Matrix::Identity(nm, nm) - ctx.ladder().K), "theta I - K");
    b.vplus = take(m.v(), p.plus);
    b.cplus.resize(p.n_plus());
    for (int k = 0; k < p.n_plus(); ++k) {
        const int s = p.plus[static_cast<std::size_t>(k)];
        b.cplus(k) = m.c(s) - theta * m.v()(s);
    }
    return b;
}

}  // namespace

Matrix T_of_theta(const KernelContext& ctx, double theta) {
    check_theta(ctx, theta);
    const Partition& p = ctx.partition();
    const int nm = p.n_minus(), np = p.n_plus();
    const Matrix& L = ctx.ladder().L;
    const Blocks b = blocks(ctx, theta);
    const Vector ratio = b.vplus.cwiseQuotient(b.cplus);
    Matrix t = Matrix::Zero(nm + np, nm + np);
    t.topLeftCorner(nm, nm) = b.rinv;
    t.topRightCorner(nm, np) = b.rinv * L + L * ratio.asDiagonal();
    t.bottomRightCorner(np, np) = Matrix(Vector(-ratio).asDiagonal());
    return unblock(p, t);
}

Matrix T_inverse(const KernelContext& ctx, double theta) {
    check_theta(ctx, theta);
    const Partition& p = ctx.partition();
    const int nm = p.n_minus(), np = p.n_plus();
    const Matrix& L = ctx.ladder().L;
    const Matrix shifted = theta * Matrix::Identity(nm, nm) - ctx.ladder().K;
    Vector ratio(np);
    for (int k = 0; k < np; ++k) {
        const int s = p.plus[static_cast<std::size_t>(k)];
        ratio(k) = (ctx.model().c(s) - theta * ctx.model().v()(s)) / ctx.model().v()(s);
    }
    Matrix t = Matrix::Zero(nm + np, nm + np);
    t.topLeftCorner(nm, nm) = shifted;
    t.topRightCorner(nm, np) = L * ratio.asDiagonal() + shifted * L;
    t.bottomRightCorner(np, np) = Matrix(Vector(-ratio).asDiagonal());
    return unblock(p, t);
}

Matrix H_hat(const KernelContext& ctx, double theta) {
    check_theta(ctx, theta);
    if (theta == 0.0) return H_total(ctx);
    const MapModel& m = ctx.model();
    const int n = m.n();
    return Matrix::Identity(n, n) - m.v().cwiseInverse().asDiagonal() * T_of_theta(ctx, theta) * A_of_theta(m, theta);
}

double wiener_hopf_residual(const KernelContext& ctx, double theta) {
    const MapModel& m = ctx.model();
    const int n = m.n();
    const Matrix lhs = T_inverse(ctx, theta) * m.v().asDiagonal() * (Matrix::Identity(n, n) - H_hat(ctx, theta));
    return sup_norm(Matrix(lhs - A_of_theta(m, theta)));
}

Matrix Gbar_transform(const KernelContext& ctx, double alpha) {
    const MapModel& m = ctx.model();
    const Partition& p = ctx.partition();
    const LadderSolution& lad = ctx.ladder();
    if (lad.kminus.size() == 0)
        throw Error(ErrorCode::DriftPositive, "closed-form overshoot transform needs k- (nonpositive drift)");
    if (!(alpha > 0)) throw Error(ErrorCode::DomainExceeded, "transform point must be positive");
    const int n = m.n(), nm = p.n_minus();
    const Matrix A = A_of_theta(m, alpha);
    const Matrix Q = m.generator();
    Matrix out = Matrix::Zero(n, n);

    for (int i : p.plus) {
        const double denom = alpha * (m.c(i) - alpha * m.v()(i));
        out.row(i) = (A.row(i) - Q.row(i)) / denom;
    }

    const Matrix E = ladder_E(p, lad.L);
    Matrix zl = Matrix::Zero(nm, n);  // (0, L) Delta_v Delta_{c - alpha v}^{-1}
    for (int b = 0; b < p.n_plus(); ++b) {
        const int j = p.plus[static_cast<std::size_t>(b)];
        zl.col(j) = lad.L.col(b) * (m.v()(j) / (m.c(j) - alpha * m.v()(j)));
    }
    const Matrix kp = lad.kminus * take(lad.pi, p.minus);
    Matrix dv = m.D_mean();
    dv.diagonal() += m.v();
    const Matrix rinv = checked_inverse(Matrix(alpha * Matrix::Identity(nm, nm) - lad.K), "alpha I - K");
    const Matrix kinv = checked_inverse(Matrix(kp - lad.K), "k- pi- - K");
    const Matrix x = rinv * E * A + zl * (A - Q) - kp * E * dv - kinv * E * Q;
    for (int a = 0; a < nm; ++a) {
        const int i = p.minus[static_cast<std::size_t>(a)];
        out.row(i) = x.row(a) / (-alpha * m.v()(i));
    }
    return out;
}

Matrix H_hat_quadrature(const KernelContext& ctx, double theta, double abs_tol) {
    const double top = ctx.cutoff(theta);
    const auto br = ctx.breaks();
    auto f = [&](double y) { return H_density(ctx, y, theta); };
    return quad::integrate(f, 0.0, top, br, {.abs_tol = abs_tol, .rel_tol = 1e-14});
}

Matrix Gbar_transform_quadrature(const KernelContext& ctx, double alpha, double width) {
    // Composite Gauss-Legendre over short panels that never straddle an atom.
    // Gbar needs int_x^inf W; the panel-end values (scaled by e^{alpha x}) are
    // accumulated backwards and topped up inside each panel with a second rule.
    const double top = ctx.cutoff(alpha);
    std::vector<double> cuts{0.0};
    const auto br = ctx.breaks();
    for (double x = width; x < top; x += width) cuts.push_back(x);
    for (double b : br)
        if (b > 0 && b < top) cuts.push_back(b);
    cuts.push_back(top);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const auto& tail = ctx.tail();
    const std::size_t np = cuts.size() - 1;
    std::vector<Matrix> upper(cuts.size(), Matrix::Zero(ctx.partition().n_minus(), ctx.model().n()));
    for (std::size_t k = np; k-- > 0;)
        upper[k] = std::exp(alpha * (cuts[k] - cuts[k + 1])) * upper[k + 1] +
                   quad::gauss_panel([&](double w) { return tail.at(w, alpha * cuts[k]); }, cuts[k], cuts[k + 1]);

    const int n = ctx.model().n();
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < np; ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        auto f = [&](double x) {
            const Matrix wu = std::exp(alpha * (x - hi)) * upper[k + 1] +
                              quad::gauss_panel([&](double w) { return tail.at(w, alpha * x); }, x, hi);
            return Gbar_from_tail(ctx, x, wu, alpha);
        };
        acc += quad::gauss_panel(f, lo, hi);
    }
    return acc;
}

}  // namespace mapruin
