#include "mapruin/cli.hpp"
#include "mapruin/kernel.hpp"
#include "mapruin/renewal.hpp"
#include "support/helpers.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mapruin;
using doctest::Approx;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(std::move(cells));
    }
    return rows;
}

double num(const std::string& s) {
    double x = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    REQUIRE(r.ec == std::errc());
    REQUIRE(r.ptr == s.data() + s.size());
    return x;
}

bool single_error_line(const std::string& err, const std::string& code) {
    return err.rfind("ERROR:" + code + ":", 0) == 0 && err.find('\n') == err.size() - 1;
}

const std::string models = MAPRUIN_MODELS_DIR;

}  // namespace

TEST_CASE("format_double is shortest round trip") {
    for (double x : {0.1, 1.0 / 3, 0.18394010379497405, 1e-300, -2.5, 0.0}) CHECK(num(format_double(x)) == x);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("decay on CL") {
    const Run r = cli({"decay", "--model", "cl"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.err.empty());
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["alpha"].get<double>() == Approx(0.5).epsilon(1e-12));
    CHECK(j["prefactor_total"][0].get<double>() == Approx(0.5).epsilon(1e-9));
    // a model file gives the same answer as the builtin
    const Run f = cli({"decay", "--model", models + "/cl.json"});
    CHECK(f.out == r.out);
}

TEST_CASE("validate on the broken-row model exits 2 and names the row") {
    const Run r = cli({"validate", "--model", models + "/broken_row.json"});
    CHECK(r.code == kExitValidation);
    CHECK(r.out.empty());
    CHECK(single_error_line(r.err, "NonConservativeRows"));
    CHECK(r.err.find("row 1") != std::string::npos);
    CHECK(cli({"validate", "--model", "onoff"}).code == kExitOk);
}

TEST_CASE("hitting CSV: columns, spot value and round trip") {
    const Run r = cli({"hitting", "--model", "cl", "--xmax", "10", "--h", "0.01"});
    REQUIRE(r.code == kExitOk);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 1002);
    CHECK(rows[0] == std::vector<std::string>{"x", "psi_0_0", "rowsum_0"});
    const auto& at2 = rows[201];
    CHECK(num(at2[0]) == Approx(2.0));
    CHECK(std::abs(num(at2[1]) - 0.5 * std::exp(-1.0)) <= 1e-3);

    const KernelContext ctx(testing::builtin("cl"));
    const HittingTable t = solve_hitting(ctx, 10.0, 0.01);
    for (std::size_t k = 0; k < t.grid.size(); ++k) {
        const double v = num(rows[k + 1][1]);
        CHECK(v == t.psi[k](0, 0));
        CHECK(num(rows[k + 1][2]) == t.psi[k].row(0).sum());
    }
}

TEST_CASE("computation errors exit 1, usage errors exit 2, one line each") {
    const std::string up = (std::filesystem::temp_directory_path() / "mapruin_positive_drift.json").string();
    {
        std::ofstream f(up);
        f << R"({"states":2,"v":[-0.2,1.0],"C":[[-1,1],[2,-2]],"D":[[0,0],[0,0]],"jumps":[]})";
    }
    const Run d = cli({"decay", "--model", up});
    std::filesystem::remove(up);
    CHECK(d.code == kExitComputation);
    CHECK(single_error_line(d.err, "DriftNonNegative"));

    const Run bad = cli({"hitting", "--model", "cl", "--xmax", "1", "--h", "0.3"});
    CHECK(bad.code == kExitValidation);
    CHECK(single_error_line(bad.err, "BadGrid"));

    const Run missing = cli({"decay", "--model", "/nonexistent/model.json"});
    CHECK(missing.code == kExitValidation);
    CHECK(missing.err.rfind("ERROR:", 0) == 0);

    const Run usage = cli({"decay"});
    CHECK(usage.code == kExitValidation);
    CHECK(single_error_line(usage.err, "Usage"));
    CHECK(cli({"frobnicate", "--model", "cl"}).code == kExitValidation);
    CHECK(cli({"decay", "--model", "cl", "--format", "xml"}).code == kExitValidation);
    CHECK(cli({"decay", "--model", "cl", "--tol", "-1"}).code == kExitValidation);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("--report carries the invariant suite") {
    const Run r = cli({"decay", "--model", "mixed3", "--report"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "decay");
    CHECK(j["report"]["all_pass"].get<bool>());
    CHECK(j["report"]["checks"].size() == 16);
    CHECK(j["result"]["alpha"].get<double>() == Approx(0.7537905879967421).epsilon(1e-12));
}

TEST_CASE("--out writes to a file, formats switch") {
    const auto path = std::filesystem::temp_directory_path() / "mapruin_cli_test.csv";
    const Run r = cli({"drift", "--model", "onoff", "--format", "csv", "--out", path.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::filesystem::remove(path);
    const auto rows = parse_csv(ss.str());
    REQUIRE(rows.size() > 1);
    bool found = false;
    for (const auto& row : rows)
        if (!row.empty() && row[0] == "drift") {
            found = true;
            CHECK(num(row.back()) == Approx(-1.0 / 3).epsilon(1e-12));
        }
    CHECK(found);

    const Run rec = cli({"hitting", "--model", "onoff", "--xmax", "1", "--h", "0.5", "--format", "record"});
    REQUIRE(rec.code == kExitOk);
    CHECK(nlohmann::json::parse(rec.out).is_object());
}

TEST_CASE("simulate is reproducible under a seed") {
    const std::vector<std::string> a{"simulate", "--model", "cl", "--reps", "2000", "--seed", "5", "--xmax", "2", "--h", "1"};
    const Run r1 = cli(a), r2 = cli(a);
    REQUIRE(r1.code == kExitOk);
    CHECK(r1.out == r2.out);
    const auto rows = parse_csv(r1.out);
    CHECK(rows[0] == std::vector<std::string>{"start", "x", "to", "p", "std_error", "lo", "hi"});
}
