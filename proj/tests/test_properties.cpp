#include "mapruin/invariants.hpp"
#include "mapruin/spectral.hpp"
#include "support/helpers.hpp"
#include "support/random_model.hpp"

#include <doctest.h>

using namespace mapruin;

TEST_CASE("identity suite holds on randomized models with jumps") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const MapModel m = validate(testing::random_model(seed));
        for (const InvariantCheck& c : run_invariants(m)) {
            INFO("seed " << seed << " " << c.name << " = " << c.value);
            CHECK(c.pass());
        }
    }
}

TEST_CASE("identity suite holds on randomized jump-free models") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const MapModel m = validate(testing::random_model(seed, false));
        for (const InvariantCheck& c : run_invariants(m)) {
            INFO("seed " << seed << " " << c.name << " = " << c.value);
            CHECK(c.pass());
        }
    }
}

TEST_CASE("identity suite on builtins covers every check") {
    for (const char* name : {"cl", "onoff", "mixed3"}) {
        const auto checks = run_invariants(testing::builtin(name));
        CHECK(checks.size() == 16);
        for (const InvariantCheck& c : checks) {
            INFO(name << " " << c.name << " = " << c.value);
            CHECK(c.pass());
        }
    }
}

TEST_CASE("drift sign controls which checks run") {
    RawModel up = builtin_model("onoff");
    up.v = {-0.2, 1.0};
    const auto checks = run_invariants(validate(up));
    CHECK(checks.size() == 2);
    for (const InvariantCheck& c : checks) CHECK(c.pass());
}

TEST_CASE("invariant theta grid stays strictly inside the bound") {
    const auto t = invariant_thetas(2.0, 0.5);
    CHECK(t.size() == 10);
    CHECK(t.front() > 0);
    CHECK(t.back() < 2.0);
    CHECK(invariant_thetas(std::numeric_limits<double>::infinity(), 0.5).back() < 1.0);
}
