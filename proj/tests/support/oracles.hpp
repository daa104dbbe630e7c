#pragma once

// Independent reference values. Nothing here calls the library's solvers:
// closed forms, a direct eigen-solve of A(theta) built from the raw model,
// and numbers frozen from an external computation.

#include "mapruin/model.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <variant>

namespace mapruin::oracle {

// Cramer-Lundberg, claims Exp(mu), Poisson rate lambda, premium rate c.
inline double cl_alpha(double lambda, double mu, double c) { return mu - lambda / c; }
inline double cl_psi(double x, double lambda, double mu, double c) {
    return lambda / (c * mu) * std::exp(-cl_alpha(lambda, mu, c) * x);
}
// P(first ladder height <= x) for the same model (defective Exp(mu)).
inline double cl_ladder_cdf(double x, double lambda, double mu, double c) {
    return lambda / (c * mu) * (1.0 - std::exp(-mu * x));
}

inline double mixture_mgf(const std::vector<MixtureComponent>& mix, double theta) {
    double s = 0.0;
    for (const auto& c : mix) {
        if (const auto* a = std::get_if<Atom>(&c.kind))
            s += c.weight * std::exp(theta * a->location);
        else if (const auto* e = std::get_if<Exponential>(&c.kind))
            s += c.weight * e->rate / (e->rate - theta);
        else {
            const auto& g = std::get<Erlang>(c.kind);
            s += c.weight * std::pow(g.rate / (g.rate - theta), g.shape);
        }
    }
    return s;
}

inline double raw_theta_max(const RawModel& raw) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& j : raw.jumps)
        for (const auto& c : j.mixture) {
            if (const auto* e = std::get_if<Exponential>(&c.kind)) t = std::min(t, e->rate);
            if (const auto* g = std::get_if<Erlang>(&c.kind)) t = std::min(t, g->rate);
        }
    return t;
}

inline Eigen::MatrixXd raw_A(const RawModel& raw, double theta) {
    const int n = raw.states;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = raw.C[i][j];
    for (const auto& j : raw.jumps) a(j.from, j.to) += raw.D[j.from][j.to] * mixture_mgf(j.mixture, theta);
    for (int i = 0; i < n; ++i) a(i, i) += theta * raw.v[i];
    return a;
}

inline double kappa(const RawModel& raw, double theta) {
    const Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(raw_A(raw, theta), false);
    return es.eigenvalues().real().maxCoeff();
}

/// Root of kappa on (0, theta_max) by TOMS 748 on the eigenvalue curve.
inline double alpha(const RawModel& raw) {
    const double tmax = raw_theta_max(raw);
    // walk the upper end out (or toward the abscissa) until kappa turns positive
    double lo = 1e-6, hi = std::isfinite(tmax) ? 0.5 * tmax : 1.0;
    for (double gap = 0.5; kappa(raw, hi) <= 0;) {
        lo = hi;
        if (std::isfinite(tmax)) {
            gap *= 0.5;
            hi = tmax * (1 - gap);
        } else {
            hi *= 2;
        }
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve([&](double t) { return kappa(raw, t); }, lo, hi,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

/// Right Perron vector of A(theta) from the null space of A - kappa I.
inline Eigen::VectorXd right_vector(const RawModel& raw, double theta) {
    const Eigen::MatrixXd a = raw_A(raw, theta);
    const double k = kappa(raw, theta);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a - k * Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    lu.setThreshold(1e-9);
    Eigen::VectorXd h = lu.kernel().col(0);
    return h / h.sum();
}

inline Eigen::RowVectorXd left_vector(const RawModel& raw, double theta) {
    const Eigen::MatrixXd a = raw_A(raw, theta).transpose();
    const double k = kappa(raw, theta);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a - k * Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    lu.setThreshold(1e-9);
    Eigen::VectorXd m = lu.kernel().col(0);
    return (m / m.sum()).transpose();
}

/// No jumps and a single up-state p: e^{alpha Y} h(M) is a martingale and the
/// level is crossed continuously in p, so P(tau_x^+ < inf | M(0) = i) =
/// h_i / h_p e^{-alpha x}, all of it landing in p.
inline double single_plus_psi(const RawModel& raw, int i, double x) {
    const double a = alpha(raw);
    const Eigen::VectorXd h = right_vector(raw, a);
    int p = 0;
    for (int k = 0; k < raw.states; ++k)
        if (raw.v[k] > 0) p = k;
    return h(i) / h(p) * std::exp(-a * x);
}

/// Same model class, stationary fluid queue: P(V > x, M = i) = pi_p mu_i / mu_p e^{-alpha x}.
inline Eigen::VectorXd single_plus_fluid_coef(const RawModel& raw, const Eigen::RowVectorXd& pi) {
    const double a = alpha(raw);
    const Eigen::RowVectorXd mu = left_vector(raw, a);
    int p = 0;
    for (int k = 0; k < raw.states; ++k)
        if (raw.v[k] > 0) p = k;
    return (pi(p) / mu(p) * mu).transpose();
}

/// Frozen from a double-precision eigenvalue root-find in an independent
/// environment (numpy eigvals + Brent), for the builtin mixed3 model.
namespace frozen {
constexpr double mixed3_alpha = 0.7537905879967421;
constexpr double mixed3_kappa_025 = -0.07633763272323524;
constexpr double mixed3_kappa_050 = -0.08369834389359987;
constexpr double mixed3_kappa_100 = 0.2842358140476611;
}  // namespace frozen

}  // namespace mapruin::oracle
