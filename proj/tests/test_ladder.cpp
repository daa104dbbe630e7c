#include "mapruin/error.hpp"
#include "mapruin/ladder.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "support/random_model.hpp"

#include <doctest.h>

using namespace mapruin;
using doctest::Approx;

TEST_CASE("CL: K = 0 and the ladder height is a defective Exp(1)") {
    const MapModel m = testing::builtin("cl");
    const LadderSolution s = solve_ladder(m);
    REQUIRE(s.K.rows() == 1);
    CHECK(std::abs(s.K(0, 0)) < 1e-11);
    CHECK(s.L.cols() == 0);
    CHECK(s.residual < 1e-11);
    CHECK(s.kminus(0) == Approx(1.0).epsilon(1e-12));
    for (double x : {0.0, 0.3, 1.0, 2.5, 8.0})
        CHECK(ladder_height(m, s, 0, x)(0) == Approx(oracle::cl_ladder_cdf(x, 0.5, 1.0, 1.0)).epsilon(1e-10));
    CHECK(ladder_height(m, s, 0, std::numeric_limits<double>::infinity())(0) == Approx(0.5).epsilon(1e-10));
}

TEST_CASE("no-jump single up-state models: ladder mass equals the martingale ratio h_i / h_p") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const RawModel raw = testing::random_single_plus_model(seed);
        const MapModel m = validate(raw);
        const LadderSolution s = solve_ladder(m);
        CHECK(s.residual < 1e-11);
        const auto& minus = m.partition().minus;
        for (int i : minus) {
            const RowVector j = ladder_height(m, s, i, std::numeric_limits<double>::infinity());
            const int p = m.partition().plus[0];
            CHECK(j(p) == Approx(oracle::single_plus_psi(raw, i, 0.0)).epsilon(1e-9));
            CHECK(j.sum() == Approx(j(p)).epsilon(1e-15));
            // no jumps: the level is crossed continuously, all mass at height 0
            CHECK(ladder_height(m, s, i, 0.0)(p) == Approx(j(p)).epsilon(1e-12));
        }
    }
    const LadderSolution onoff = solve_ladder(testing::builtin("onoff"));
    CHECK(onoff.L(0, 0) == Approx(0.5).epsilon(1e-11));
    CHECK(std::abs(onoff.K(0, 0)) < 1e-11);
}

TEST_CASE("structural properties on random models") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const MapModel m = validate(testing::random_model(seed));
        const Partition& p = m.partition();
        const LadderSolution s = solve_ladder(m);
        INFO("seed " << seed);
        CHECK(s.residual <= 1e-11);
        CHECK(s.residual == Approx(ladder_residual(m, s.K, s.L)).epsilon(1e-6));
        // K is ML, L >= 0
        for (Index i = 0; i < s.K.rows(); ++i)
            for (Index j = 0; j < s.K.cols(); ++j)
                if (i != j) CHECK(s.K(i, j) >= -1e-14);
        if (s.L.size()) CHECK(s.L.minCoeff() >= 0.0);
        // pi- K = 0, pi- L = pi+
        const RowVector pim = take(s.pi, p.minus), pip = take(s.pi, p.plus);
        CHECK(testing::max_abs(Matrix(pim * s.K)) <= 1e-10);
        if (p.n_plus()) CHECK(testing::max_abs(Matrix(pim * s.L - pip)) <= 1e-10);
        CHECK(testing::max_abs(Matrix(s.K * s.kminus)) <= 1e-10);
        CHECK(pim.dot(s.kminus) == Approx(1.0).epsilon(1e-12));
        // ladder law mass: rows of J(inf) sum to at most 1
        const LadderTail tail(m, s.K, s.L);
        for (int i : p.minus) {
            const RowVector j = ladder_height(m, s, tail, i, std::numeric_limits<double>::infinity());
            CHECK(j.minCoeff() >= -1e-14);
            CHECK(j.sum() <= 1.0 + 1e-12);
            // nondecreasing in x
            CHECK((ladder_height(m, s, tail, i, 0.5) - j).maxCoeff() <= 1e-14);
        }
    }
}

TEST_CASE("dual consistency: row-form solve on the dual matches the transposed ladder") {
    for (std::uint64_t seed = 11; seed <= 16; ++seed) {
        const MapModel m = validate(testing::random_model(seed));
        const LadderSolution s = solve_ladder(m);
        const DescendingSolution d = solve_descending(dual_model(m));
        CHECK(d.residual <= 1e-11);
        CHECK(testing::max_abs(Matrix(d.Q - s.Qdual)) <= 1e-9);
        CHECK(testing::max_abs(Matrix(d.R - s.Rdual)) <= 1e-9);
        const auto [q, r] = dual_ladder(s.pi, m.partition(), s.K, s.L);
        CHECK(testing::max_abs(Matrix(q - s.Qdual)) == 0.0);
        CHECK(testing::max_abs(Matrix(r - s.Rdual)) == 0.0);
    }
}

TEST_CASE("error contracts") {
    const MapModel cl = testing::builtin("cl");
    const LadderSolution s = solve_ladder(cl);
    const MapModel onoff = testing::builtin("onoff");
    CHECK_THROWS_AS(ladder_height(onoff, solve_ladder(onoff), 1, 1.0), Error);
    // positive drift: kminus is not defined
    RawModel up = builtin_model("onoff");
    up.v = {-0.2, 1.0};
    const MapModel mu = validate(up);
    const LadderSolution su = solve_ladder(mu);
    CHECK(su.kminus.size() == 0);
    CHECK(su.residual < 1e-11);
    try {
        k_eigenvector(mu, su.K);
        FAIL("expected DriftPositive");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DriftPositive);
    }
    CHECK(s.iterations > 0);
}
