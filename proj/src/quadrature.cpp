#include "mapruin/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <array>

namespace mapruin::quad {

namespace {

struct Tables {
    std::array<double, 20> nodes{};
    std::array<double, 20> weights{};

    Tables() {
        using Rule = boost::math::quadrature::gauss<double, 20>;
        const auto& x = Rule::abscissa();
        const auto& w = Rule::weights();
        // boost stores the nonnegative half; mirror it
        for (std::size_t k = 0; k < 10; ++k) {
            nodes[9 - k] = -x[k];
            nodes[10 + k] = x[k];
            weights[9 - k] = w[k];
            weights[10 + k] = w[k];
        }
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

}  // namespace

std::span<const double> GaussLegendre20::nodes() const { return tables().nodes; }
std::span<const double> GaussLegendre20::weights() const { return tables().weights; }

const GaussLegendre20& gauss_legendre20() {
    static const GaussLegendre20 rule;
    return rule;
}

double envelope_cutoff(double rate, int shape, double eps) {
    if (!(rate > 0)) return 0.0;
    double x = -std::log(eps) / rate;
    for (int it = 0; it < 50; ++it) {
        const double poly = shape > 1 ? (shape - 1) * std::log(std::max(1.0, rate * x)) : 0.0;
        const double next = (-std::log(eps) + poly + std::log(1.0 + shape)) / rate;
        if (std::abs(next - x) < 1e-9 * x) return next;
        x = next;
    }
    return x;
}

}  // namespace mapruin::quad
