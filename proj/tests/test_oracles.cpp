// The oracles are checked against textbook numbers before any library value
// is compared with them.
#include "support/helpers.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace mapruin;
using doctest::Approx;

TEST_CASE("Cramer-Lundberg closed forms") {
    CHECK(oracle::cl_alpha(0.5, 1.0, 1.0) == 0.5);
    CHECK(oracle::cl_psi(0.0, 0.5, 1.0, 1.0) == 0.5);
    CHECK(oracle::cl_psi(2.0, 0.5, 1.0, 1.0) == Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(oracle::cl_ladder_cdf(1e9, 0.5, 1.0, 1.0) == Approx(0.5));
}

TEST_CASE("eigenvalue kappa reproduces the scalar CL exponent") {
    const RawModel cl = builtin_model("cl");
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double closed = -0.5 + 0.5 / (1.0 - t) - t;
        CHECK(oracle::kappa(cl, t) == Approx(closed).epsilon(1e-14));
    }
    CHECK(oracle::alpha(cl) == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("ONOFF: characteristic polynomial root and martingale formulas") {
    const RawModel onoff = builtin_model("onoff");
    // det(A(theta)) = theta (theta - 1) for this generator
    for (double t : {0.2, 0.5, 1.5}) CHECK(oracle::raw_A(onoff, t).determinant() == Approx(t * (1 - t)).epsilon(1e-14));
    CHECK(oracle::alpha(onoff) == Approx(1.0).epsilon(1e-14));
    CHECK(oracle::single_plus_psi(onoff, 0, 0.0) == Approx(0.5).epsilon(1e-13));
    CHECK(oracle::single_plus_psi(onoff, 1, 2.0) == Approx(std::exp(-2.0)).epsilon(1e-13));
    Eigen::RowVectorXd pi(2);
    pi << 2.0 / 3.0, 1.0 / 3.0;
    const Eigen::VectorXd coef = oracle::single_plus_fluid_coef(onoff, pi);
    CHECK(coef(0) == Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(coef(1) == Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("mixed3 eigenvalue oracle agrees with the frozen external values") {
    const RawModel m = builtin_model("mixed3");
    CHECK(oracle::alpha(m) == Approx(oracle::frozen::mixed3_alpha).epsilon(1e-13));
    CHECK(oracle::kappa(m, 0.25) == Approx(oracle::frozen::mixed3_kappa_025).epsilon(1e-13));
    CHECK(oracle::kappa(m, 0.5) == Approx(oracle::frozen::mixed3_kappa_050).epsilon(1e-13));
    CHECK(oracle::kappa(m, 1.0) == Approx(oracle::frozen::mixed3_kappa_100).epsilon(1e-13));
}
