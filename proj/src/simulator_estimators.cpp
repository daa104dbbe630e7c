#include "mapruin/error.hpp"
#include "mapruin/simulator.hpp"
#include "mapruin/spectral.hpp"
#include "path_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mapruin {

namespace {

constexpr double kTruncEps = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

double truncation_gap(const MapModel& model) {
    const double alpha = decay_rate(model);
    return std::log(1.0 / kTruncEps) / alpha;
}

// Calls body(r) for r in [first, first + reps); results are stored per
// replication by the body, so the order of execution does not matter.
template <typename Body>
void replicate(long long reps, bool parallel, const Body& body) {
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 256)
        for (long long r = 0; r < reps; ++r) body(r);
    } else {
        for (long long r = 0; r < reps; ++r) body(r);
    }
}

HittingEstimate hitting_impl(const MapModel& model, const std::vector<double>& levels, int start,
                             const RunOptions& opt, bool parallel) {
    if (start < 0 || start >= model.n()) throw Error(ErrorCode::BadGrid, "start state out of range");
    if (!std::is_sorted(levels.begin(), levels.end()) || (!levels.empty() && levels.front() < 0))
        throw Error(ErrorCode::BadGrid, "levels must be nonnegative and ascending");
    if (!(mean_drift(model) < 0))
        throw Error(ErrorCode::DriftNonNegative, "hitting estimates need a negative drift for the stopping rule");
    const double gap = truncation_gap(model);
    const detail::PathStepper st(model);
    const std::size_t nl = levels.size();
    std::vector<int> hit(static_cast<std::size_t>(opt.reps) * nl);
    replicate(opt.reps, parallel, [&](long long r) {
        auto rng = replication_rng(opt.seed, static_cast<std::uint64_t>(r));
        std::vector<Passage> out;
        detail::first_passages(st, rng, start, levels, gap, out);
        for (std::size_t l = 0; l < nl; ++l) hit[static_cast<std::size_t>(r) * nl + l] = out[l].state;
    });

    HittingEstimate est;
    est.levels = levels;
    est.start = start;
    est.truncation_bound = kTruncEps;
    const int n = model.n();
    for (std::size_t l = 0; l < nl; ++l) {
        std::vector<long long> count(static_cast<std::size_t>(n) + 1, 0);
        for (long long r = 0; r < opt.reps; ++r) {
            const int s = hit[static_cast<std::size_t>(r) * nl + l];
            ++count[static_cast<std::size_t>(s < 0 ? n : s)];
        }
        std::vector<Estimate> row;
        for (int j = 0; j < n; ++j) row.push_back(binomial_estimate(count[static_cast<std::size_t>(j)], opt.reps));
        est.by_state.push_back(std::move(row));
        est.never.push_back(binomial_estimate(count[static_cast<std::size_t>(n)], opt.reps));
    }
    return est;
}

}  // namespace

HittingEstimate estimate_hitting(const MapModel& model, const std::vector<double>& levels, int start,
                                 const RunOptions& opt) {
    return hitting_impl(model, levels, start, opt, opt.parallel);
}

HittingEstimate estimate_hitting_serial(const MapModel& model, const std::vector<double>& levels, int start,
                                        const RunOptions& opt) {
    return hitting_impl(model, levels, start, opt, false);
}

double LadderSample::cdf(int j, double x) const {
    long long c = 0;
    for (std::size_t r = 0; r < state.size(); ++r)
        if (state[r] == j && height[r] <= x) ++c;
    return state.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(state.size());
}

double LadderSample::mass(int j) const {
    const auto c = std::count(state.begin(), state.end(), j);
    return state.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(state.size());
}

LadderSample estimate_ladder(const MapModel& model, int start, const RunOptions& opt) {
    const auto& minus = model.partition().minus;
    if (std::find(minus.begin(), minus.end(), start) == minus.end())
        throw Error(ErrorCode::NotMinusState, "ladder draws start in a state with v < 0");
    const bool negative = mean_drift(model) < 0;
    const double gap = negative ? truncation_gap(model) : kInf;
    const detail::PathStepper st(model);
    LadderSample s;
    s.start = start;
    s.truncation_bound = negative ? kTruncEps : 0.0;
    s.state.resize(static_cast<std::size_t>(opt.reps));
    s.height.resize(static_cast<std::size_t>(opt.reps));
    const std::vector<double> zero{0.0};
    replicate(opt.reps, opt.parallel, [&](long long r) {
        auto rng = replication_rng(opt.seed, static_cast<std::uint64_t>(r));
        std::vector<Passage> out;
        detail::first_passages(st, rng, start, zero, gap, out);
        s.state[static_cast<std::size_t>(r)] = out[0].state;
        s.height[static_cast<std::size_t>(r)] = out[0].overshoot;
    });
    return s;
}

DualityReport check_duality_nojump(const MapModel& model, const RunOptions& opt) {
    if (model.has_jumps()) throw Error(ErrorCode::HasJumps, "the no-jump duality check needs D = 0");
    const Partition& p = model.partition();
    const int n = model.n(), nm = p.n_minus(), np = p.n_plus();
    const RowVector pi = stationary_dist(model);
    const bool negative = mean_drift(model) < 0;
    const double gap = negative ? truncation_gap(model) : kInf;
    const MapModel dual = dual_model(model);
    const detail::PathStepper st(model), dst(dual);
    const std::vector<double> zero{0.0};
    const auto reps = static_cast<std::uint64_t>(opt.reps);

    // side 1: M(0) ~ pi, record (M(0), M(tau_0^+)) for M(0) in S-
    std::vector<int> from1(reps), to1(reps);
    replicate(opt.reps, opt.parallel, [&](long long r) {
        auto rng = replication_rng(opt.seed, static_cast<std::uint64_t>(r));
        const int s0 = st.draw_stationary(rng);
        from1[static_cast<std::size_t>(r)] = s0;
        to1[static_cast<std::size_t>(r)] = -1;
        if (model.v()(s0) < 0) {
            std::vector<Passage> out;
            detail::first_passages(st, rng, s0, zero, gap, out);
            to1[static_cast<std::size_t>(r)] = out[0].state;
        }
    });
    // side 2: dual from M~(0) ~ pi, record (M~(0), M~(tau~_0^-)) for M~(0) in S+
    std::vector<int> from2(reps), to2(reps);
    replicate(opt.reps, opt.parallel, [&](long long r) {
        auto rng = replication_rng(opt.seed, reps + static_cast<std::uint64_t>(r));
        const int s0 = dst.draw_stationary(rng);
        from2[static_cast<std::size_t>(r)] = s0;
        to2[static_cast<std::size_t>(r)] = dual.v()(s0) > 0 ? detail::first_descent(dst, rng, s0) : -1;
    });
    // P(tau_0^+ < inf) from the down-crossing start
    double aminus = 0.0, aplus = 0.0;
    std::vector<double> cum;
    for (int i = 0; i < n; ++i) (model.v()(i) < 0 ? aminus : aplus) += std::abs(model.v()(i)) * pi(i);
    for (int i : p.minus) cum.push_back((cum.empty() ? 0.0 : cum.back()) - model.v()(i) * pi(i) / aminus);
    cum.back() = 1.0;
    std::vector<char> hit(reps);
    replicate(opt.reps, opt.parallel, [&](long long r) {
        auto rng = replication_rng(opt.seed, 2 * reps + static_cast<std::uint64_t>(r));
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        std::size_t a = 0;
        while (a + 1 < cum.size() && u >= cum[a]) ++a;
        std::vector<Passage> out;
        detail::first_passages(st, rng, p.minus[a], zero, gap, out);
        hit[static_cast<std::size_t>(r)] = out[0].state >= 0;
    });

    DualityReport rep;
    rep.lhs = Matrix::Zero(nm, np);
    rep.rhs = Matrix::Zero(nm, np);
    rep.z = Matrix::Zero(nm, np);
    const double nr = static_cast<double>(opt.reps);
    for (int a = 0; a < nm; ++a)
        for (int b = 0; b < np; ++b) {
            const int i = p.minus[static_cast<std::size_t>(a)], k = p.plus[static_cast<std::size_t>(b)];
            long long c1 = 0, c2 = 0;
            for (std::size_t r = 0; r < reps; ++r) {
                c1 += from1[r] == i && to1[r] == k;
                c2 += from2[r] == k && to2[r] == i;
            }
            const double p1 = static_cast<double>(c1) / nr, p2 = static_cast<double>(c2) / nr;
            const double w1 = -model.v()(i), w2 = model.v()(k);
            rep.lhs(a, b) = w1 * p1;
            rep.rhs(a, b) = w2 * p2;
            const double se = std::sqrt(w1 * w1 * p1 * (1 - p1) / nr + w2 * w2 * p2 * (1 - p2) / nr);
            rep.z(a, b) = se > 0 ? (rep.lhs(a, b) - rep.rhs(a, b)) / se : 0.0;
        }
    const long long hits = std::count(hit.begin(), hit.end(), 1);
    rep.hit = binomial_estimate(hits, opt.reps);
    rep.ratio = std::min(1.0, aplus / aminus);
    const double se = std::sqrt(rep.ratio * (1 - rep.ratio) / nr);
    rep.z_hit = se > 0 ? (rep.hit.value - rep.ratio) / se : 0.0;
    return rep;
}

FluidEstimate estimate_fluid_tail(const MapModel& model, const std::vector<double>& levels, double horizon,
                                  const RunOptions& opt) {
    if (!(mean_drift(model) < 0)) throw Error(ErrorCode::DriftNonNegative, "the fluid queue is unstable");
    if (!(horizon > 0)) throw Error(ErrorCode::BadGrid, "horizon must be positive");
    const detail::PathStepper st(model);
    const auto reps = static_cast<std::size_t>(opt.reps);
    std::vector<double> level(reps);
    std::vector<int> state(reps);
    replicate(opt.reps, opt.parallel, [&](long long r) {
        auto rng = replication_rng(opt.seed, static_cast<std::uint64_t>(r));
        int s = st.draw_stationary(rng);
        double t = 0.0, v = 0.0;
        while (true) {
            const double dt = std::min(st.holding(s, rng), horizon - t);
            v = std::max(0.0, v + st.velocity(s) * dt);
            t += dt;
            if (t >= horizon) break;
            const auto mv = st.move(s, rng);
            s = mv.to;
            v += mv.jump;
        }
        level[static_cast<std::size_t>(r)] = v;
        state[static_cast<std::size_t>(r)] = s;
    });

    FluidEstimate est;
    est.levels = levels;
    est.horizon = horizon;
    const int n = model.n();
    for (double x : levels) {
        std::vector<long long> count(static_cast<std::size_t>(n), 0);
        long long total = 0;
        for (std::size_t r = 0; r < reps; ++r)
            if (level[r] > x) {
                ++count[static_cast<std::size_t>(state[r])];
                ++total;
            }
        std::vector<Estimate> row;
        for (int i = 0; i < n; ++i) row.push_back(binomial_estimate(count[static_cast<std::size_t>(i)], opt.reps));
        est.by_state.push_back(std::move(row));
        est.total.push_back(binomial_estimate(total, opt.reps));
    }
    return est;
}

}  // namespace mapruin
