#include "mapruin/spectral.hpp"

#include "mapruin/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace mapruin {

namespace {

constexpr int kInverseSweeps = 8;

// eigenvalue only: near the mgf abscissa A(theta) is too ill-conditioned
// for the Perron vectors, but the sign of kappa is all the bracket needs
double kappa_at(const MapModel& model, double theta) {
    const Eigen::EigenSolver<Matrix> es(A_of_theta(model, theta), false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigenvalue solver failed");
    return es.eigenvalues().real().maxCoeff();
}

}  // namespace

Matrix A_of_theta(const MapModel& model, double theta) {
    Matrix a = model.C() + model.D_hat(theta);
    a.diagonal() += theta * model.v();
    return a;
}

double theta_max(const MapModel& model) { return model.jump_abscissa(); }

SpectralPoint perron_of(const Matrix& a, const Vector& kminus, std::span<const int> minus) {
    const Index n = a.rows();
    // rightmost eigenvalue is real and simple for an irreducible ML matrix
    const Eigen::EigenSolver<Matrix> es(a, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigenvalue solver failed");
    double kappa = es.eigenvalues().real().maxCoeff();

    // inverse iteration just above kappa for both Perron vectors
    const double sigma = kappa + 1e-9 * (1.0 + std::abs(kappa));
    Eigen::PartialPivLU<Matrix> lu(a - sigma * Matrix::Identity(n, n));
    Eigen::PartialPivLU<Matrix> lut(Matrix(a.transpose() - sigma * Matrix::Identity(n, n)));
    Vector h = Vector::Ones(n);
    RowVector mu = RowVector::Ones(n);
    for (int it = 0; it < kInverseSweeps; ++it) {
        Vector hn = lu.solve(h);
        Vector mn = lut.solve(Vector(mu.transpose()));
        if (!hn.allFinite() || !mn.allFinite()) throw Error(ErrorCode::NoConvergence, "inverse iteration broke down");
        hn /= hn.sum();
        mn /= mn.sum();
        const double dh = (hn - h).cwiseAbs().maxCoeff(), dm = (mn.transpose() - mu).cwiseAbs().maxCoeff();
        h = std::move(hn);
        mu = mn.transpose();
        if (dh < 1e-15 && dm < 1e-15) break;
    }
    kappa = (mu * a * h).value() / mu.dot(h);

    if (h.minCoeff() <= 0 || mu.minCoeff() <= 0)
        throw Error(ErrorCode::NoConvergence, "Perron vectors are not strictly positive");

    SpectralPoint p;
    p.kappa = kappa;
    if (kminus.size() > 0) {
        double s = 0.0;
        for (std::size_t a2 = 0; a2 < minus.size(); ++a2) s += mu(minus[a2]) * kminus(static_cast<Index>(a2));
        mu /= s;
        p.normalization = Normalization::KMinus;
    } else {
        mu /= mu.sum();
        p.normalization = Normalization::UnitSum;
    }
    h /= mu.dot(h);
    p.mu = std::move(mu);
    p.h = std::move(h);
    return p;
}

SpectralPoint perron(const MapModel& model, double theta, const Vector& kminus) {
    SpectralPoint p = perron_of(A_of_theta(model, theta), kminus, model.partition().minus);
    p.theta = theta;
    return p;
}

double kappa_prime(const MapModel& model, const SpectralPoint& point) {
    Matrix d = model.D_hat_deriv(point.theta);
    d.diagonal() += model.v();
    return (point.mu * d * point.h).value() / point.mu.dot(point.h);
}

double decay_rate(const MapModel& model, const DecayOptions& opt) {
    const double drift = mean_drift(model);
    if (drift >= 0)
        throw Error(ErrorCode::DriftNonNegative,
                    "mean drift " + std::to_string(drift) + " is not negative; no decay rate exists");

    const double tmax = theta_max(model);
    double lo = 1e-8;
    double hi;
    if (std::isfinite(tmax)) {
        double gap = 0.5;
        for (hi = tmax * (1.0 - gap);; hi = tmax * (1.0 - gap)) {
            const double k = kappa_at(model, hi);
            if (k > 0) break;
            if (k == 0.0) return hi;
            lo = hi;
            gap *= 0.5;
            if (gap < 1e-8)
                throw Error(ErrorCode::NoRoot, "kappa stays negative up to the mgf abscissa " + std::to_string(tmax));
        }
    } else {
        hi = 1.0;
        for (double k = kappa_at(model, hi); !(k > 0); k = kappa_at(model, hi)) {
            if (k == 0.0) return hi;
            lo = hi;
            hi *= 2.0;
            if (hi > 1e6) throw Error(ErrorCode::NoRoot, "kappa stays negative on (0, 1e6]");
        }
    }
    if (!(kappa_at(model, lo) < 0))
        throw Error(ErrorCode::NoRoot, "kappa is not negative just right of 0");

    while (hi - lo > opt.width) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (kappa_at(model, mid) < 0 ? lo : hi) = mid;
    }
    // Newton polish, kept only if it stays in the bracket
    double alpha = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        const SpectralPoint p = perron(model, alpha, Vector());
        const double next = alpha - p.kappa / kappa_prime(model, p);
        if (!(next >= lo - opt.width && next <= hi + opt.width)) break;
        alpha = next;
    }
    return alpha;
}

}  // namespace mapruin
