#include "mapruin/cli.hpp"

#include "mapruin/error.hpp"
#include "mapruin/invariants.hpp"
#include "mapruin/kernel.hpp"
#include "mapruin/model_io.hpp"
#include "mapruin/renewal.hpp"
#include "mapruin/simulator.hpp"
#include "mapruin/spectral.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace mapruin {

using json = nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

enum class Format { Csv, Record };

struct RunConfig {
    std::string command;
    std::string model;
    double xmax = 0;  // 0: command default
    double h = 0;     // 0: command default
    double tol = 1e-12;
    std::uint64_t seed = 1;
    long long reps = 100000;
    std::string out;
    std::optional<Format> format;
    bool report = false;
};

// Result of one subcommand: a structured record plus its CSV rendering.
struct Output {
    json record;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// CLI-level failure with an explicit diagnostic code and exit status.
struct UsageError {
    std::string code;
    std::string message;
    int exit;
};

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

void diag(std::ostream& err, std::string_view code, const std::string& msg) {
    err << "ERROR:" << code << ": " << one_line(msg) << '\n';
}

json to_record(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

json to_record(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
json to_record(const RowVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_record(const Estimate& e) {
    return {{"value", e.value}, {"std_error", e.std_error}, {"lo", e.lo}, {"hi", e.hi}, {"reps", e.reps},
            {"confidence", e.confidence}};
}

// Long-format CSV for scalar/matrix results: name,row,col,value.
struct LongTable {
    Output& o;
    void scalar(const std::string& name, double x) { o.rows.push_back({name, "", "", format_double(x)}); }
    void vec(const std::string& name, const Eigen::Ref<const Eigen::VectorXd>& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            o.rows.push_back({name, std::to_string(i), "", format_double(v(i))});
    }
    void row(const std::string& name, const RowVector& v) { vec(name, v.transpose()); }
    void mat(const std::string& name, const Matrix& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                o.rows.push_back({name, std::to_string(i), std::to_string(j), format_double(m(i, j))});
    }
};

Output long_output() {
    Output o;
    o.header = {"name", "row", "col", "value"};
    return o;
}

LadderOptions ladder_options(const RunConfig& cfg) {
    LadderOptions lo;
    lo.step_tol = cfg.tol;
    return lo;
}

DecayOptions decay_options(const RunConfig& cfg) {
    DecayOptions d;
    d.width = cfg.tol / 10.0;
    return d;
}

Output cmd_validate(const MapModel& m, const RunConfig&) {
    Output o = long_output();
    const Partition& p = m.partition();
    o.record = {{"valid", true}, {"states", m.n()}, {"minus", p.minus}, {"plus", p.plus},
                {"has_jumps", m.has_jumps()}, {"model", to_json(m)}};
    LongTable t{o};
    t.scalar("states", m.n());
    t.scalar("n_minus", p.n_minus());
    t.scalar("n_plus", p.n_plus());
    return o;
}

Output cmd_drift(const MapModel& m, const RunConfig&) {
    Output o = long_output();
    const RowVector pi = stationary_dist(m);
    const double d = mean_drift(m);
    o.record = {{"drift", d}, {"pi", to_record(pi)}, {"theta_max", theta_max(m)}};
    LongTable t{o};
    t.scalar("drift", d);
    t.row("pi", pi);
    t.scalar("theta_max", theta_max(m));
    return o;
}

Output cmd_ladder(const MapModel& m, const RunConfig& cfg) {
    Output o = long_output();
    const LadderSolution s = solve_ladder(m, ladder_options(cfg));
    o.record = {{"K", to_record(s.K)},        {"L", to_record(s.L)},       {"pi", to_record(s.pi)},
                {"drift", s.drift},           {"residual", s.residual},    {"iterations", s.iterations},
                {"Q_dual", to_record(s.Qdual)}, {"R_dual", to_record(s.Rdual)}};
    LongTable t{o};
    t.mat("K", s.K);
    t.mat("L", s.L);
    if (s.kminus.size()) {
        o.record["kminus"] = to_record(s.kminus);
        t.vec("kminus", s.kminus);
    }
    t.scalar("residual", s.residual);
    t.scalar("iterations", s.iterations);
    return o;
}

Output cmd_decay(const MapModel& m, const RunConfig& cfg) {
    Output o = long_output();
    const double alpha = decay_rate(m, decay_options(cfg));
    const KernelContext ctx(m, ladder_options(cfg));
    const AsymptoticResult a = asymptotics(ctx, alpha);
    o.record = {{"alpha", alpha}, {"kappa_alpha", a.point.kappa}, {"prefactor_total", to_record(a.prefactor_total)},
                {"h", to_record(a.point.h)}, {"mu", to_record(a.point.mu)}};
    LongTable t{o};
    t.scalar("alpha", alpha);
    t.scalar("kappa_alpha", a.point.kappa);
    t.vec("prefactor_total", a.prefactor_total);
    return o;
}

Output cmd_asymptotics(const MapModel& m, const RunConfig& cfg) {
    Output o = long_output();
    const double alpha = decay_rate(m, decay_options(cfg));
    const KernelContext ctx(m, ladder_options(cfg));
    const AsymptoticResult a = asymptotics(ctx, alpha);
    o.record = {{"alpha", a.alpha},
                {"kappa_alpha", a.point.kappa},
                {"h", to_record(a.point.h)},
                {"mu", to_record(a.point.mu)},
                {"nu", to_record(a.nu)},
                {"eta_alpha", a.eta_alpha},
                {"eta_zero", a.eta_zero},
                {"prefactor_full", to_record(a.prefactor_full)},
                {"prefactor_total", to_record(a.prefactor_total)},
                {"prefactor_continuous", to_record(a.prefactor_continuous)},
                {"gamma", to_record(a.gamma)}};
    LongTable t{o};
    t.scalar("alpha", a.alpha);
    t.vec("h", a.point.h);
    t.row("nu", a.nu);
    t.mat("prefactor_full", a.prefactor_full);
    t.vec("prefactor_total", a.prefactor_total);
    t.mat("prefactor_continuous", a.prefactor_continuous);
    return o;
}

Output cmd_fluid(const MapModel& m, const RunConfig&) {
    Output o = long_output();
    const FluidTail f = fluid_tail(m);
    o.record = {{"alpha", f.alpha},       {"coef", to_record(f.coef)},  {"Q", to_record(f.Q)},
                {"R", to_record(f.R)},    {"beta", to_record(f.beta)},  {"beta_residual", f.beta_residual},
                {"residual", f.residual}};
    LongTable t{o};
    t.scalar("alpha", f.alpha);
    t.vec("coef", f.coef);
    t.row("beta", f.beta);
    return o;
}

void check_grid(double xmax, double h) {
    if (!(h > 0) || !(xmax > 0)) throw UsageError{"BadGrid", "--xmax and --h must be positive", kExitValidation};
    const double k = std::round(xmax / h);
    if (std::abs(k * h - xmax) > 1e-12 * std::max(1.0, xmax))
        throw UsageError{"BadGrid", "--xmax must be a multiple of --h", kExitValidation};
}

Output cmd_hitting(const MapModel& m, const RunConfig& cfg) {
    const KernelContext ctx(m, ladder_options(cfg));
    const double xmax = cfg.xmax > 0 ? cfg.xmax : 10.0;
    double h = cfg.h;
    if (!(h > 0)) h = mean_drift(m) < 0 ? default_step(xmax, decay_rate(m, decay_options(cfg))) : xmax / 1000.0;
    check_grid(xmax, h);
    const HittingTable tab = solve_hitting(ctx, xmax, h);
    const int n = m.n();
    Output o;
    o.header.push_back("x");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) o.header.push_back("psi_" + std::to_string(i) + "_" + std::to_string(j));
    for (int i = 0; i < n; ++i) o.header.push_back("rowsum_" + std::to_string(i));
    json psi = json::array();
    for (std::size_t k = 0; k < tab.grid.size(); ++k) {
        std::vector<std::string> r{format_double(tab.grid[k])};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r.push_back(format_double(tab.psi[k](i, j)));
        for (int i = 0; i < n; ++i) r.push_back(format_double(tab.psi[k].row(i).sum()));
        o.rows.push_back(std::move(r));
        psi.push_back(to_record(tab.psi[k]));
    }
    o.record = {{"step", tab.step}, {"x", tab.grid}, {"psi", std::move(psi)}, {"kernel_cutoff", tab.kernel_cutoff}};
    return o;
}

Output cmd_simulate(const MapModel& m, const RunConfig& cfg) {
    const double xmax = cfg.xmax > 0 ? cfg.xmax : 5.0;
    const double h = cfg.h > 0 ? cfg.h : 1.0;
    check_grid(xmax, h);
    if (cfg.reps < 1) throw UsageError{"BadConfig", "--reps must be >= 1", kExitValidation};
    std::vector<double> levels;
    const auto count = static_cast<long long>(std::llround(xmax / h));
    for (long long k = 0; k <= count; ++k) levels.push_back(static_cast<double>(k) * h);
    RunOptions ro;
    ro.seed = cfg.seed;
    ro.reps = cfg.reps;

    Output o;
    o.header = {"start", "x", "to", "p", "std_error", "lo", "hi"};
    json starts = json::array();
    for (int i = 0; i < m.n(); ++i) {
        const HittingEstimate e = estimate_hitting(m, levels, i, ro);
        json by_level = json::array();
        for (std::size_t l = 0; l < levels.size(); ++l) {
            json cells = json::array();
            for (int j = 0; j <= m.n(); ++j) {
                const Estimate& est = j < m.n() ? e.by_state[l][static_cast<std::size_t>(j)] : e.never[l];
                o.rows.push_back({std::to_string(i), format_double(levels[l]), j < m.n() ? std::to_string(j) : "none",
                                  format_double(est.value), format_double(est.std_error), format_double(est.lo),
                                  format_double(est.hi)});
                if (j < m.n()) cells.push_back(to_record(est));
            }
            by_level.push_back({{"x", levels[l]}, {"by_state", std::move(cells)}, {"never", to_record(e.never[l])}});
        }
        starts.push_back({{"start", i}, {"levels", std::move(by_level)}});
    }
    o.record = {{"seed", cfg.seed}, {"reps", cfg.reps}, {"truncation_bound", 1e-6}, {"estimates", std::move(starts)}};
    return o;
}

void write_csv(std::ostream& os, const Output& o) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) os << (c ? "," : "") << cells[c];
        os << '\n';
    };
    line(o.header);
    for (const auto& r : o.rows) line(r);
}

json report_record(const MapModel& m) {
    json checks = json::array();
    bool all = true;
    for (const InvariantCheck& c : run_invariants(m)) {
        checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
        all = all && c.pass();
    }
    return {{"checks", std::move(checks)}, {"all_pass", all}};
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    using Handler = std::function<Output(const MapModel&, const RunConfig&)>;
    static const std::vector<std::pair<std::string, Handler>> handlers = {
        {"validate", cmd_validate}, {"drift", cmd_drift},           {"ladder", cmd_ladder},
        {"decay", cmd_decay},       {"hitting", cmd_hitting},       {"asymptotics", cmd_asymptotics},
        {"fluid", cmd_fluid},       {"simulate", cmd_simulate}};
    const auto it = std::find_if(handlers.begin(), handlers.end(), [&](const auto& h) { return h.first == cfg.command; });
    const bool table = cfg.command == "hitting" || cfg.command == "simulate";
    const Format fmt = cfg.format.value_or(table ? Format::Csv : Format::Record);

    try {
        if (!(cfg.tol > 0)) throw UsageError{"BadConfig", "--tol must be positive", kExitValidation};
        const MapModel model = validate(resolve_model(cfg.model));
        Output o = it->second(model, cfg);

        std::ofstream file;
        std::ostream* os = &out;
        if (!cfg.out.empty()) {
            file.open(cfg.out);
            if (!file) throw UsageError{"IOError", "cannot open " + cfg.out + " for writing", kExitComputation};
            os = &file;
        }
        if (cfg.report) {
            *os << json{{"command", cfg.command}, {"result", o.record}, {"report", report_record(model)}}.dump() << '\n';
        } else if (fmt == Format::Csv) {
            write_csv(*os, o);
        } else {
            *os << o.record.dump() << '\n';
        }
        os->flush();
        if (!*os) throw UsageError{"IOError", "write failed", kExitComputation};
        return kExitOk;
    } catch (const UsageError& e) {
        diag(err, e.code, e.message);
        return e.exit;
    } catch (const ValidationError& e) {
        for (const auto& d : e.diagnostics()) diag(err, to_string(d.code), d.message);
        return kExitValidation;
    } catch (const Error& e) {
        diag(err, to_string(e.code()), e.what());
        return is_validation_error(e.code()) ? kExitValidation : kExitComputation;
    } catch (const std::exception& e) {
        diag(err, "Internal", e.what());
        return kExitComputation;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hitting probabilities and decay asymptotics for Markov additive processes", "mapruin"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);
    RunConfig cfg;
    std::string format;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "check a model file"},
        {"drift", "stationary distribution and mean drift"},
        {"ladder", "ascending ladder matrices K, L"},
        {"decay", "decay rate alpha and total prefactor"},
        {"hitting", "Psi(x) on a grid from the renewal equation"},
        {"asymptotics", "alpha, Perron data and prefactors"},
        {"fluid", "stationary fluid queue tail"},
        {"simulate", "Monte Carlo hitting probabilities"}};
    for (const auto& [name, desc] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--model", cfg.model, "model file, or builtin name (cl, onoff, mixed3)")->required();
        sub->add_option("--xmax", cfg.xmax, "grid end");
        sub->add_option("--h", cfg.h, "grid step");
        sub->add_option("--tol", cfg.tol, "ladder step tolerance; alpha bracket width is tol/10");
        sub->add_option("--seed", cfg.seed, "simulation seed");
        sub->add_option("--reps", cfg.reps, "simulation replications");
        sub->add_option("--out", cfg.out, "output file (default stdout)");
        sub->add_option("--format", format, "csv or record")->check(CLI::IsMember({"csv", "record"}));
        sub->add_flag("--report", cfg.report, "emit the invariant suite with the result as one record");
        sub->callback([&cfg, name = name] { cfg.command = name; });
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        diag(err, "Usage", e.what());
        return kExitValidation;
    }
    if (!format.empty()) cfg.format = format == "csv" ? Format::Csv : Format::Record;
    return execute(cfg, out, err);
}

}  // namespace mapruin
