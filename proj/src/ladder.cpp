#include "mapruin/ladder.hpp"

#include "mapruin/error.hpp"
#include "mapruin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace mapruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// E = (I, L) laid out in original column order.
Matrix assemble_E(const Partition& p, const Matrix& L) {
    const int m = p.n_minus();
    Matrix e = Matrix::Zero(m, p.n_minus() + p.n_plus());
    for (int a = 0; a < m; ++a) e(a, p.minus[static_cast<std::size_t>(a)]) = 1.0;
    for (int b = 0; b < p.n_plus(); ++b) e.col(p.plus[static_cast<std::size_t>(b)]) = L.col(b);
    return e;
}

// E' = (I; R) laid out in original row order.
Matrix assemble_Erow(const Partition& p, const Matrix& R) {
    const int m = p.n_minus();
    Matrix e = Matrix::Zero(p.n_minus() + p.n_plus(), m);
    for (int a = 0; a < m; ++a) e(p.minus[static_cast<std::size_t>(a)], a) = 1.0;
    for (int b = 0; b < p.n_plus(); ++b) e.row(p.plus[static_cast<std::size_t>(b)]) = R.row(b);
    return e;
}

// Column j of int e^{uK} E D(du): sum_k D_kj Fhat_kj(K) E[:,k].
Matrix jump_columns(const MapModel& model, const Matrix& K, const Matrix& E) {
    const int n = model.n();
    Matrix out = Matrix::Zero(E.rows(), n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (const auto* f = model.jump(k, j)) out.col(j) += model.D()(k, j) * (f->matrix_mgf(K) * E.col(k));
    return out;
}

// Row i of int D(du) E' e^{uQ}: sum_k D_ik E'[k,:] Fhat_ik(Q).
Matrix jump_rows(const MapModel& model, const Matrix& Q, const Matrix& E) {
    const int n = model.n();
    Matrix out = Matrix::Zero(n, E.cols());
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (const auto* f = model.jump(i, k)) out.row(i) += model.D()(i, k) * (E.row(k) * f->matrix_mgf(Q));
    return out;
}

void require_minus(const MapModel& model) {
    if (model.partition().n_minus() == 0)
        throw Error(ErrorCode::EmptyMinus, "no state has negative drift rate; ladder objects are undefined");
}

}  // namespace

double ladder_residual(const MapModel& model, const Matrix& K, const Matrix& L) {
    const Matrix E = assemble_E(model.partition(), L);
    Matrix rhs = E * model.C() + jump_columns(model, K, E);
    rhs = rhs * model.v().cwiseInverse().asDiagonal();
    return sup_norm(Matrix(-K * E - rhs));
}

double descending_residual(const MapModel& model, const Matrix& Q, const Matrix& R) {
    const Matrix E = assemble_Erow(model.partition(), R);
    Matrix rhs = model.C() * E + jump_rows(model, Q, E);
    rhs = model.v().cwiseInverse().asDiagonal() * rhs;
    return sup_norm(Matrix(-E * Q - rhs));
}

LadderSolution solve_ladder(const MapModel& model, const LadderOptions& opt) {
    require_minus(model);
    const Partition& p = model.partition();
    const int m = p.n_minus(), np = p.n_plus();
    const Matrix& C = model.C();
    const Vector& v = model.v();

    Matrix K = Matrix::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        const int j = p.minus[static_cast<std::size_t>(a)];
        K(a, a) = C(j, j) / std::abs(v(j));
    }
    Matrix L = Matrix::Zero(m, np);

    int it = 0;
    double step = kInf;
    for (; it < opt.max_iter && step >= opt.step_tol; ++it) {
        const Matrix E = assemble_E(p, L);
        const Matrix J = jump_columns(model, K, E);
        const Matrix EC = E * C;
        Matrix Kn(m, m);
        for (int a = 0; a < m; ++a) {
            const int j = p.minus[static_cast<std::size_t>(a)];
            Kn.col(a) = (EC.col(j) + J.col(j)) / std::abs(v(j));
        }
        Matrix Ln(m, np);
        const Matrix id = Matrix::Identity(m, m);
        for (int b = 0; b < np; ++b) {
            const int j = p.plus[static_cast<std::size_t>(b)];
            const Vector rhs = (EC.col(j) - E.col(j) * C(j, j) + J.col(j)) / v(j);
            const double shift = model.c(j) / v(j);
            Ln.col(b) = (shift * id - Kn).partialPivLu().solve(rhs);
        }
        step = std::max(sup_norm(Matrix(Kn - K)), sup_norm(Matrix(Ln - L)));
        K = std::move(Kn);
        L = std::move(Ln);
        if (!K.allFinite() || !L.allFinite())
            throw Error(ErrorCode::NoConvergence, "ladder iteration produced non-finite values");
    }
    if (step >= opt.step_tol)
        throw Error(ErrorCode::NoConvergence,
                    "ladder iteration hit the cap of " + std::to_string(opt.max_iter) + " sweeps (last step " +
                        std::to_string(step) + ")");

    LadderSolution s;
    s.K = std::move(K);
    s.L = std::move(L);
    s.iterations = it;
    s.residual = ladder_residual(model, s.K, s.L);
    s.pi = stationary_dist(model);
    s.drift = s.pi.dot(model.v()) + (s.pi * model.D_mean()).sum();
    if (s.drift <= 0) s.kminus = k_eigenvector(s.K, take(s.pi, p.minus));
    std::tie(s.Qdual, s.Rdual) = dual_ladder(s.pi, p, s.K, s.L);
    return s;
}

DescendingSolution solve_descending(const MapModel& model, const LadderOptions& opt) {
    require_minus(model);
    const Partition& p = model.partition();
    const int m = p.n_minus(), np = p.n_plus();
    const Matrix& C = model.C();
    const Vector& v = model.v();

    Matrix Q = Matrix::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        const int i = p.minus[static_cast<std::size_t>(a)];
        Q(a, a) = C(i, i) / std::abs(v(i));
    }
    Matrix R = Matrix::Zero(np, m);

    int it = 0;
    double step = kInf;
    const Matrix id = Matrix::Identity(m, m);
    for (; it < opt.max_iter && step >= opt.step_tol; ++it) {
        const Matrix E = assemble_Erow(p, R);
        const Matrix J = jump_rows(model, Q, E);
        const Matrix CE = C * E;
        Matrix Qn(m, m);
        for (int a = 0; a < m; ++a) {
            const int i = p.minus[static_cast<std::size_t>(a)];
            Qn.row(a) = (CE.row(i) + J.row(i)) / std::abs(v(i));
        }
        Matrix Rn(np, m);
        for (int b = 0; b < np; ++b) {
            const int i = p.plus[static_cast<std::size_t>(b)];
            const RowVector rhs = (CE.row(i) - C(i, i) * E.row(i) + J.row(i)) / v(i);
            const double shift = model.c(i) / v(i);
            // R_b (shift I - Q) = rhs  <=>  (shift I - Q)' R_b' = rhs'
            Rn.row(b) = (shift * id - Qn).transpose().partialPivLu().solve(rhs.transpose()).transpose();
        }
        step = std::max(sup_norm(Matrix(Qn - Q)), sup_norm(Matrix(Rn - R)));
        Q = std::move(Qn);
        R = std::move(Rn);
        if (!Q.allFinite() || !R.allFinite())
            throw Error(ErrorCode::NoConvergence, "descending iteration produced non-finite values");
    }
    if (step >= opt.step_tol)
        throw Error(ErrorCode::NoConvergence,
                    "descending iteration hit the cap of " + std::to_string(opt.max_iter) + " sweeps");

    DescendingSolution s;
    s.Q = std::move(Q);
    s.R = std::move(R);
    s.iterations = it;
    s.residual = descending_residual(model, s.Q, s.R);
    return s;
}

std::pair<Matrix, Matrix> dual_ladder(const RowVector& pi, const Partition& part, const Matrix& K,
                                      const Matrix& L) {
    const RowVector pm = take(pi, part.minus);
    const RowVector pp = take(pi, part.plus);
    Matrix q = pm.cwiseInverse().asDiagonal() * K.transpose() * pm.asDiagonal();
    Matrix r = pp.cwiseInverse().asDiagonal() * L.transpose() * pm.asDiagonal();
    return {std::move(q), std::move(r)};
}

Vector k_eigenvector(const Matrix& K, const RowVector& pi_minus) {
    const Index m = K.rows();
    Matrix a(m + 1, m);
    a.topRows(m) = K;
    a.row(m) = pi_minus;
    Vector b = Vector::Zero(m + 1);
    b(m) = 1.0;
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    Vector k = qr.solve(b);
    k += qr.solve(Vector(b - a * k));
    return k;
}

Vector k_eigenvector(const MapModel& model, const Matrix& K) {
    if (mean_drift(model) > 0)
        throw Error(ErrorCode::DriftPositive, "K has no null vector when the mean drift is positive");
    return k_eigenvector(K, take(stationary_dist(model), model.partition().minus));
}

LadderTail::LadderTail(const MapModel& model, const Matrix& K, const Matrix& L)
    : E_(assemble_E(model.partition(), L)), n_(model.n()), breaks_(model.atom_locations()) {
    for (int k = 0; k < n_; ++k)
        for (int j = 0; j < n_; ++j)
            if (const auto* f = model.jump(k, j)) terms_.push_back({k, j, model.D()(k, j), f->prepare_tail(K)});
    cutoff_ = model.max_atom();
    if (std::isfinite(model.jump_abscissa()))
        cutoff_ += quad::envelope_cutoff(model.jump_abscissa(), model.max_shape(), 1e-17);
}

Matrix LadderTail::at(double w, double log_scale) const {
    Matrix out = Matrix::Zero(E_.rows(), n_);
    for (const auto& t : terms_) out.col(t.to) += t.rate * (t.tail.at(w, log_scale) * E_.col(t.from));
    return out;
}

Matrix LadderTail::integral(double a, double b, double abs_tol) const {
    b = std::min(b, cutoff_);
    if (!(b > a)) return Matrix::Zero(E_.rows(), n_);
    return quad::integrate([this](double w) { return at(w); }, a, b, breaks_, {.abs_tol = abs_tol});
}

RowVector ladder_height(const MapModel& model, const LadderSolution& ladder, const LadderTail& tail, int i,
                        double x) {
    const Partition& p = model.partition();
    const auto it = std::find(p.minus.begin(), p.minus.end(), i);
    if (it == p.minus.end())
        throw Error(ErrorCode::NotMinusState, "ladder height rows exist only for states with v(i) < 0");
    const int a = static_cast<int>(it - p.minus.begin());
    RowVector row = tail.integral(0.0, std::max(0.0, x)).row(a);
    for (int b = 0; b < p.n_plus(); ++b) {
        const int j = p.plus[static_cast<std::size_t>(b)];
        row(j) += ladder.L(a, b) * model.v()(j);
    }
    return row / -model.v()(i);
}

RowVector ladder_height(const MapModel& model, const LadderSolution& ladder, int i, double x) {
    return ladder_height(model, ladder, LadderTail(model, ladder.K, ladder.L), i, x);
}

}  // namespace mapruin
