#include "mapruin/kernel.hpp"
#include "mapruin/kernel_tabulate.hpp"
#include "mapruin/spectral.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "support/random_model.hpp"

#include <doctest.h>

using namespace mapruin;
using doctest::Approx;

namespace {
bool tot_ok(const Matrix& h) { return h.minCoeff() >= -1e-13 && h.rowwise().sum().maxCoeff() <= 1.0 + 1e-12; }
}  // namespace

TEST_CASE("CL kernel: H is the defective Exp(1) ladder law, Gbar its tail") {
    const KernelContext ctx(testing::builtin("cl"));
    for (double x : {0.1, 1.0, 3.0}) {
        CHECK(H_at(ctx, x)(0, 0) == Approx(oracle::cl_ladder_cdf(x, 0.5, 1.0, 1.0)).epsilon(1e-10));
        CHECK(H_density(ctx, x)(0, 0) == Approx(0.5 * std::exp(-x)).epsilon(1e-10));
        CHECK(Gbar_at(ctx, x)(0, 0) == Approx(0.5 * std::exp(-x)).epsilon(1e-10));
    }
    CHECK(H_total(ctx)(0, 0) == Approx(0.5).epsilon(1e-12));
    // int e^{theta y} 0.5 e^{-y} dy
    for (double t : {0.2, 0.5, 0.9})
        CHECK(H_hat(ctx, t)(0, 0) == Approx(0.5 / (1 - t)).epsilon(1e-11));
    // int e^{x/2} 0.5 e^{-x} dx = 1
    CHECK(Gbar_transform(ctx, 0.5)(0, 0) == Approx(1.0).epsilon(1e-11));
}

TEST_CASE("ONOFF kernel: the S+ row is an Exp(c/v) sojourn") {
    const KernelContext ctx(testing::builtin("onoff"));
    const Matrix tot = H_total(ctx);
    CHECK(tot.row(0).sum() == Approx(0.5).epsilon(1e-11));
    // plus row: rate 2 / 1 exit to the minus state, where the level is hit from below at 0 again
    CHECK(tot(1, 0) == Approx(1.0).epsilon(1e-11));
    CHECK(H_at(ctx, 0.7)(1, 0) == Approx(1 - std::exp(-1.4)).epsilon(1e-11));
}

TEST_CASE("H_hat, Wiener-Hopf and Gbar transform agree with quadrature on random models") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const MapModel m = validate(testing::random_model(seed));
        const KernelContext ctx(m);
        INFO("seed " << seed);
        const double a = decay_rate(m);
        const double bound = theta_bound(ctx);
        CHECK(bound > a);
        for (double t : {0.0, 0.3 * a, a, std::min(0.5 * (a + bound), 2 * a)}) {
            CHECK(testing::rel_err(H_hat_quadrature(ctx, t), H_hat(ctx, t)) <= 1e-7);
            CHECK(wiener_hopf_residual(ctx, t) <= 1e-9);
        }
        CHECK(testing::rel_err(H_hat(ctx, 0.0), H_total(ctx)) <= 1e-10);
        CHECK(testing::rel_err(Gbar_transform_quadrature(ctx, a), Gbar_transform(ctx, a)) <= 1e-7);
        // T and its inverse
        const Matrix T = T_of_theta(ctx, 0.5 * a);
        CHECK(testing::max_abs(Matrix(T * T_inverse(ctx, 0.5 * a) - Matrix::Identity(m.n(), m.n()))) <= 1e-10);
        // kernel mass: H(inf) substochastic, nonnegative, H(x) nondecreasing
        CHECK(tot_ok(H_total(ctx)));
    }
}

TEST_CASE("kernel table pieces match the pointwise functions") {
    const KernelContext ctx(testing::builtin("mixed3"));
    const KernelTable t = tabulate_kernel_serial(ctx, 0.05, 40);
    REQUIRE(t.density.size() == 41);
    for (int k : {1, 7, 40}) {
        CHECK(testing::max_abs(Matrix(t.density[k] - H_density(ctx, k * 0.05))) <= 1e-13);
        CHECK(testing::max_abs(Matrix(t.gbar[k] - Gbar_at(ctx, k * 0.05))) <= 1e-12);
    }
    // Gbar(0) + H(inf) row sums: each up-crossing either overshoots or renews
    const Matrix g0 = Gbar_at(ctx, 0.0);
    const Matrix ht = H_total(ctx);
    const Vector lhs = g0.rowwise().sum();
    const Vector rhs = ht.rowwise().sum();
    for (Index i = 0; i < lhs.size(); ++i) CHECK(lhs(i) + 1e-12 >= 0.0);
    CHECK(rhs.maxCoeff() <= 1.0 + 1e-12);
}
