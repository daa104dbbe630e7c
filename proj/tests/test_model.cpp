#include "mapruin/error.hpp"
#include "mapruin/jump_mixture.hpp"
#include "mapruin/model.hpp"
#include "mapruin/model_io.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "support/random_model.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

using namespace mapruin;
using doctest::Approx;

namespace {

ErrorCode validation_code(const RawModel& raw, std::string* message = nullptr) {
    try {
        validate(raw);
    } catch (const ValidationError& e) {
        if (message) *message = e.diagnostics().front().message;
        return e.diagnostics().front().code;
    }
    FAIL("model was accepted");
    return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("builtin models validate and partition by sign of v") {
    const MapModel cl = testing::builtin("cl");
    CHECK(cl.n() == 1);
    CHECK(cl.partition().minus == std::vector<int>{0});
    CHECK(cl.partition().plus.empty());
    const MapModel m3 = testing::builtin("mixed3");
    CHECK(m3.partition().minus == std::vector<int>{0, 2});
    CHECK(m3.partition().plus == std::vector<int>{1});
}

TEST_CASE("validation names the offending row") {
    RawModel raw = builtin_model("onoff");
    raw.C[1][1] = -1.5;
    std::string msg;
    CHECK(validation_code(raw, &msg) == ErrorCode::NonConservativeRows);
    CHECK(msg.find("row 1") != std::string::npos);
}

TEST_CASE("validation rejects bad inputs") {
    RawModel raw = builtin_model("onoff");
    raw.v[0] = 0.0;
    CHECK(validation_code(raw) == ErrorCode::ZeroRate);

    raw = builtin_model("onoff");
    raw.C = {{-1.0, 1.0}, {0.0, 0.0}};
    CHECK(validation_code(raw) == ErrorCode::Reducible);

    raw = builtin_model("cl");
    raw.jumps.front().mixture = {{0.7, Exponential{1.0}}};
    CHECK(validation_code(raw) == ErrorCode::BadMixture);

    raw = builtin_model("cl");
    raw.jumps.clear();
    CHECK(validation_code(raw) == ErrorCode::BadMixture);
}

TEST_CASE("parser rejects unknown keys and malformed documents") {
    auto code_of = [](const std::string& text) {
        try {
            parse_model_text(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::NoRoot;
    };
    CHECK(code_of(R"({"states":1,"v":[-1],"C":[[0]],"D":[[0]],"extra":1})") == ErrorCode::ParseError);
    CHECK(code_of(R"({"states":1,"v":[-1],"C":[[0]]})") == ErrorCode::ParseError);
    CHECK(code_of("{not json") == ErrorCode::ParseError);
    CHECK(code_of(R"({"states":1,"v":[-1],"C":[[-1]],"D":[[1]],"jumps":[{"from":0,"to":0,"mixture":[{"weight":1,"kind":"gamma","params":{}}]}]})") ==
          ErrorCode::ParseError);
}

TEST_CASE("JSON round trip preserves the model") {
    for (const char* name : {"cl", "onoff", "mixed3"}) {
        const MapModel m = testing::builtin(name);
        const MapModel back = validate(parse_model(to_json(m)));
        CHECK(testing::max_abs(Matrix(back.C() - m.C())) == 0.0);
        CHECK(testing::max_abs(Matrix(back.D() - m.D())) == 0.0);
        CHECK(testing::max_abs(Matrix(back.v() - m.v())) == 0.0);
        CHECK(to_json(back) == to_json(m));
    }
}

TEST_CASE("stationary distribution, drift and the dual model") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MapModel m = validate(testing::random_model(seed));
        const RowVector pi = stationary_dist(m);
        CHECK(std::abs(pi.sum() - 1.0) < 1e-14);
        CHECK(testing::max_abs(Matrix(pi * m.generator())) < 1e-13);
        CHECK(mean_drift(m) < 0);

        const MapModel d = dual_model(m);
        CHECK(testing::max_abs(Matrix(stationary_dist(d) - pi)) < 1e-13);
        CHECK(mean_drift(d) == Approx(mean_drift(m)).epsilon(1e-12));
        const MapModel dd = dual_model(d);
        CHECK(testing::max_abs(Matrix(dd.C() - m.C())) < 1e-13);
        CHECK(testing::max_abs(Matrix(dd.D() - m.D())) < 1e-13);
        // Delta_pi D~ = D' Delta_pi
        CHECK(testing::max_abs(Matrix(pi.asDiagonal() * d.D() - m.D().transpose() * pi.asDiagonal())) < 1e-14);
    }
    // ONOFF: pi = (2/3, 1/3), drift = -1/3
    const MapModel onoff = testing::builtin("onoff");
    CHECK(stationary_dist(onoff)(0) == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(mean_drift(onoff) == Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(mean_drift(testing::builtin("cl")) == Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("jump mixture scalar transforms") {
    const JumpMixture mix({{0.3, Atom{0.4}}, {0.3, Exponential{2.0}}, {0.4, Erlang{3, 4.0}}});
    const std::vector<MixtureComponent> comps = mix.components();
    CHECK(mix.abscissa() == 2.0);
    CHECK(mix.max_atom() == 0.4);
    CHECK(mix.mean() == Approx(0.3 * 0.4 + 0.3 * 0.5 + 0.4 * 0.75).epsilon(1e-15));
    for (double t : {-1.0, 0.0, 0.5, 1.5}) CHECK(mix.mgf(t) == Approx(oracle::mixture_mgf(comps, t)).epsilon(1e-14));

    boost::math::gamma_distribution<double> g3(3, 0.25);
    for (double x : {0.1, 0.4, 1.0, 3.0}) {
        const double ref = 0.3 * (x >= 0.4) + 0.3 * (1 - std::exp(-2 * x)) + 0.4 * boost::math::cdf(g3, x);
        CHECK(mix.cdf(x) == Approx(ref).epsilon(1e-14));
    }
    CHECK(mix.tail(0.4) == Approx(1.0 - (0.3 * (1 - std::exp(-0.8)) + 0.4 * boost::math::cdf(g3, 0.4))).epsilon(1e-14));

    // smoothed CDF against numerical convolution of the continuous part
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    for (double a : {0.5, 3.0, 9.0})
        for (double x : {0.2, 1.0, 4.0}) {
            const double cont = GK::integrate(
                [&](double u) {
                    return std::exp(-a * (x - u)) *
                           (0.3 * 2 * std::exp(-2 * u) + 0.4 * boost::math::pdf(g3, u));
                },
                0.0, x, 12, 1e-15);
            const double ref = cont + (x >= 0.4 ? 0.3 * std::exp(-a * (x - 0.4)) : 0.0);
            CHECK(mix.smoothed(x, a) == Approx(ref).epsilon(1e-12));
            // the tail jumps at the atom, so split there
            const auto tail_f = [&](double s) { return std::exp(-a * (x - s)) * mix.tail(s); };
            const double cut = std::min(x, 0.4);
            const double tail_ref =
                GK::integrate(tail_f, 0.0, cut, 12, 1e-15) + (x > cut ? GK::integrate(tail_f, cut, x, 12, 1e-15) : 0.0);
            CHECK(mix.smoothed_tail(x, a) == Approx(tail_ref).epsilon(1e-9));
        }
}

TEST_CASE("smoothed Erlang keeps relative accuracy deep in the tail") {
    // e^{rate x} g(x) -> rate^k x^{k-1}/((k-1)! (a - rate)) as x -> inf
    const JumpMixture e = JumpMixture::erlang(2, 2.0);
    const double x = 200.0, a = 12.0;
    const double scaled = e.smoothed(x, a, 2.0 * x);
    const double lead = 4.0 * x / 10.0 - 4.0 / 100.0;  // exact for k = 2 once e^{-dx} is negligible
    CHECK(scaled == Approx(lead).epsilon(1e-13));
    CHECK(e.smoothed(x, a) == Approx(lead * std::exp(-2.0 * x)).epsilon(1e-12));
}

TEST_CASE("matrix transforms reduce to scalars for 1x1 arguments") {
    const JumpMixture mix({{0.5, Atom{0.7}}, {0.25, Exponential{3.0}}, {0.25, Erlang{2, 5.0}}});
    for (double k : {-2.0, -0.5, 1.0}) {
        const Matrix K = Matrix::Constant(1, 1, k);
        CHECK(mix.matrix_mgf(K)(0, 0) == Approx(mix.mgf(k)).epsilon(1e-13));
        CHECK(mix.matrix_tail(0.0, K)(0, 0) == Approx(mix.mgf(k)).epsilon(1e-13));
    }
    // int_{[w,inf)} e^{(y-w)k} F(dy) for the exponential part is e^{-3w} * 3/(3-k)
    const JumpMixture ex = JumpMixture::exponential(3.0);
    CHECK(ex.matrix_tail(0.8, Matrix::Constant(1, 1, -1.0))(0, 0) == Approx(std::exp(-2.4) * 0.75).epsilon(1e-14));
    CHECK_THROWS_AS(ex.matrix_mgf(Matrix::Constant(1, 1, 3.5)), Error);
}
