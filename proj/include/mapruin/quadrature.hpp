#pragma once

#include "mapruin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace mapruin::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-13;
    int max_depth = 48;
};

/// 20-point Gauss-Legendre rule on [-1, 1] (full node set, ascending).
struct GaussLegendre20 {
    static constexpr int size = 20;
    std::span<const double> nodes() const;
    std::span<const double> weights() const;
};

const GaussLegendre20& gauss_legendre20();

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Matrix& m) { return sup_norm(m); }

template <typename F>
auto gauss_panel(const F& f, double a, double b) {
    const auto& rule = gauss_legendre20();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    auto nodes = rule.nodes();
    auto weights = rule.weights();
    auto acc = f(mid + half * nodes[0]);
    acc *= weights[0];
    for (int k = 1; k < GaussLegendre20::size; ++k) acc += weights[k] * f(mid + half * nodes[k]);
    acc *= half;
    return acc;
}

namespace detail {

template <typename F, typename T>
T adapt(const F& f, double a, double b, const T& whole, double tol, double rel, int depth) {
    const double mid = 0.5 * (a + b);
    T left = gauss_panel(f, a, mid);
    T right = gauss_panel(f, mid, b);
    T sum = left + right;
    const double err = magnitude(T(sum - whole));
    if (depth <= 0 || !(err > std::max(tol, rel * magnitude(sum))) || !(mid > a && b > mid))
        return sum;
    return adapt(f, a, mid, left, 0.5 * tol, rel, depth - 1) +
           adapt(f, mid, b, right, 0.5 * tol, rel, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Legendre on [a, b] for scalar- or matrix-valued integrands.
/// `breaks` lists interior points where f may jump (atom locations); panels
/// are never straddled across them.
template <typename F>
auto integrate(const F& f, double a, double b, std::span<const double> breaks = {},
               const Options& opt = {}) {
    using T = std::decay_t<decltype(f(a))>;
    std::vector<double> cuts{a};
    for (double p : breaks)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double total = b - a;
    T acc = gauss_panel(f, cuts[0], cuts[1]);
    acc *= 0.0;
    if (!(total > 0)) return acc;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        const double tol = opt.abs_tol * (hi - lo) / total;
        T whole = gauss_panel(f, lo, hi);
        acc += detail::adapt(f, lo, hi, whole, tol, opt.rel_tol, opt.max_depth);
    }
    return acc;
}

/// Smallest x such that x^{shape-1} e^{-rate x} stays below eps beyond x
/// (envelope cutoff used to truncate infinite-range integrals).
double envelope_cutoff(double rate, int shape, double eps);

}  // namespace mapruin::quad
