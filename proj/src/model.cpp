#include "mapruin/model.hpp"

#include "mapruin/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mapruin {

namespace {

constexpr double kRowTolerance = 1e-10;

std::string cell(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

bool strongly_connected(const Matrix& g) {
    const int n = static_cast<int>(g.rows());
    auto reach_all = [&](bool transpose) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < n; ++j) {
                const double w = transpose ? g(j, i) : g(i, j);
                if (i != j && w > 0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = 1;
                    stack.push_back(j);
                }
            }
        }
        for (char s : seen)
            if (!s) return false;
        return true;
    };
    return reach_all(false) && reach_all(true);
}

}  // namespace

const JumpMixture* MapModel::jump(int i, int j) const {
    const auto& slot = jumps_[static_cast<std::size_t>(i * n() + j)];
    return slot ? &*slot : nullptr;
}

double MapModel::max_atom() const noexcept {
    double m = 0.0;
    for (const auto& f : jumps_)
        if (f) m = std::max(m, f->max_atom());
    return m;
}

int MapModel::max_shape() const noexcept {
    int m = 1;
    for (const auto& f : jumps_)
        if (f) m = std::max(m, f->max_shape());
    return m;
}

std::vector<double> MapModel::atom_locations() const {
    std::vector<double> out;
    for (const auto& f : jumps_)
        if (f)
            for (double a : f->atom_locations()) out.push_back(a);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Matrix MapModel::D_hat(double theta) const {
    Matrix out = Matrix::Zero(n(), n());
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j)
            if (const auto* f = jump(i, j)) out(i, j) = d_(i, j) * f->mgf(theta);
    return out;
}

Matrix MapModel::D_hat_deriv(double theta) const {
    Matrix out = Matrix::Zero(n(), n());
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j)
            if (const auto* f = jump(i, j)) out(i, j) = d_(i, j) * f->mgf_deriv(theta);
    return out;
}

Matrix MapModel::D_mean() const {
    Matrix out = Matrix::Zero(n(), n());
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j)
            if (const auto* f = jump(i, j)) out(i, j) = d_(i, j) * f->mean();
    return out;
}

void MapModel::finish() {
    partition_ = {};
    for (int i = 0; i < n(); ++i) (v_(i) < 0 ? partition_.minus : partition_.plus).push_back(i);
    jump_abscissa_ = std::numeric_limits<double>::infinity();
    for (const auto& f : jumps_)
        if (f) jump_abscissa_ = std::min(jump_abscissa_, f->abscissa());
}

MapModel validate(const RawModel& raw) {
    std::vector<ValidationError::Diagnostic> diags;
    auto fail = [&](ErrorCode code, std::string msg) { diags.push_back({code, std::move(msg)}); };

    const int n = raw.states;
    if (n < 1) throw ValidationError({{ErrorCode::ParseError, "states must be >= 1"}});
    auto square = [&](const std::vector<std::vector<double>>& m, const char* name) {
        bool ok = static_cast<int>(m.size()) == n;
        for (const auto& row : m) ok = ok && static_cast<int>(row.size()) == n;
        if (!ok) fail(ErrorCode::ParseError, std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n));
        return ok;
    };
    square(raw.C, "C");
    square(raw.D, "D");
    if (static_cast<int>(raw.v.size()) != n) fail(ErrorCode::ParseError, "v must have " + std::to_string(n) + " entries");
    if (!diags.empty()) throw ValidationError(std::move(diags));

    MapModel m;
    m.v_ = Vector(n);
    m.c_ = Matrix(n, n);
    m.d_ = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        m.v_(i) = raw.v[static_cast<std::size_t>(i)];
        if (m.v_(i) == 0.0 || !std::isfinite(m.v_(i)))
            fail(ErrorCode::ZeroRate, "v(" + std::to_string(i) + ") must be nonzero and finite");
        for (int j = 0; j < n; ++j) {
            m.c_(i, j) = raw.C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            m.d_(i, j) = raw.D[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!std::isfinite(m.c_(i, j)) || !std::isfinite(m.d_(i, j)))
                fail(ErrorCode::ParseError, "non-finite rate at " + cell(i, j));
            if (i != j && m.c_(i, j) < 0) fail(ErrorCode::NonConservativeRows, "negative C" + cell(i, j));
            if (m.d_(i, j) < 0) fail(ErrorCode::NonConservativeRows, "negative D" + cell(i, j));
        }
    }
    for (int i = 0; i < n; ++i) {
        double out = m.d_.row(i).sum();
        for (int j = 0; j < n; ++j)
            if (j != i) out += m.c_(i, j);
        if (std::abs(m.c_(i, i) + out) > kRowTolerance)
            fail(ErrorCode::NonConservativeRows,
                 "row " + std::to_string(i) + ": C_ii = " + std::to_string(m.c_(i, i)) +
                     " but outflow is " + std::to_string(out));
    }

    m.jumps_.assign(static_cast<std::size_t>(n * n), std::nullopt);
    for (const auto& j : raw.jumps) {
        if (j.from < 0 || j.from >= n || j.to < 0 || j.to >= n) {
            fail(ErrorCode::BadMixture, "jump " + cell(j.from, j.to) + " out of range");
            continue;
        }
        auto& slot = m.jumps_[static_cast<std::size_t>(j.from * n + j.to)];
        if (slot) {
            fail(ErrorCode::BadMixture, "duplicate jump entry " + cell(j.from, j.to));
            continue;
        }
        if (!(m.d_(j.from, j.to) > 0)) {
            fail(ErrorCode::BadMixture, "jump given for D" + cell(j.from, j.to) + " = 0");
            continue;
        }
        try {
            slot.emplace(j.mixture);
        } catch (const ValidationError& e) {
            for (const auto& d : e.diagnostics()) fail(d.code, "jump " + cell(j.from, j.to) + ": " + d.message);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const bool listed = std::any_of(raw.jumps.begin(), raw.jumps.end(),
                                            [&](const RawModel::Jump& jp) { return jp.from == i && jp.to == j; });
            if (m.d_(i, j) > 0 && !listed)
                fail(ErrorCode::BadMixture, "D" + cell(i, j) + " > 0 has no jump distribution");
        }

    if (n > 1 && !strongly_connected(m.c_ + m.d_)) fail(ErrorCode::Reducible, "C + D is not irreducible");
    if (!diags.empty()) throw ValidationError(std::move(diags));
    m.finish();
    return m;
}

RowVector stationary_dist(const MapModel& model) {
    const int n = model.n();
    const Matrix q = model.generator();
    // [Q' ; e'] pi' = [0 ; 1]
    Matrix a(n + 1, n);
    a.topRows(n) = q.transpose();
    a.row(n).setOnes();
    Vector b = Vector::Zero(n + 1);
    b(n) = 1.0;
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(1e-13);
    if (qr.rank() < n) throw Error(ErrorCode::SingularSolve, "generator has a rank-deficient balance system");
    Vector pi = qr.solve(b);
    // one refinement sweep
    pi += qr.solve(Vector(b - a * pi));
    if (pi.minCoeff() <= 0) throw Error(ErrorCode::SingularSolve, "stationary vector is not strictly positive");
    pi /= pi.sum();
    return pi.transpose();
}

double mean_drift(const MapModel& model) {
    const RowVector pi = stationary_dist(model);
    return pi.dot(model.v()) + (pi * model.D_mean()).sum();
}

MapModel dual_model(const MapModel& model) {
    const int n = model.n();
    const RowVector pi = stationary_dist(model);
    MapModel d;
    d.v_ = model.v_;
    d.c_ = Matrix(n, n);
    d.d_ = Matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            d.c_(i, j) = pi(j) * model.c_(j, i) / pi(i);
            d.d_(i, j) = pi(j) * model.d_(j, i) / pi(i);
        }
    d.jumps_.assign(static_cast<std::size_t>(n * n), std::nullopt);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d.jumps_[static_cast<std::size_t>(i * n + j)] = model.jumps_[static_cast<std::size_t>(j * n + i)];
    d.finish();
    return d;
}

}  // namespace mapruin
