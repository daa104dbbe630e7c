#include "mapruin/simulator.hpp"

#include "mapruin/error.hpp"
#include "path_stepper.hpp"

#include <boost/math/distributions/beta.hpp>

#include <cmath>
#include <limits>

namespace mapruin {

namespace detail {

PathStepper::PathStepper(const MapModel& model) {
    const int n = model.n();
    options_.resize(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        v_.push_back(model.v()(s));
        rate_.push_back(model.c(s));
        double cum = 0.0;
        auto& opts = options_[static_cast<std::size_t>(s)];
        for (int j = 0; j < n; ++j) {
            if (j != s && model.C()(s, j) > 0) {
                cum += model.C()(s, j) / model.c(s);
                opts.push_back({j, cum, nullptr});
            }
            if (model.D()(s, j) > 0) {
                cum += model.D()(s, j) / model.c(s);
                opts.push_back({j, cum, model.jump(s, j)});
            }
        }
        if (!opts.empty()) opts.back().cum = 1.0;
    }
    const RowVector pi = stationary_dist(model);
    double cum = 0.0;
    for (int s = 0; s < n; ++s) pi_cum_.push_back(cum += pi(s));
    pi_cum_.back() = 1.0;
}

PathStepper::Move PathStepper::move(int s, std::mt19937_64& rng) const {
    const auto& opts = options_[static_cast<std::size_t>(s)];
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Option* pick = &opts.back();
    for (const auto& o : opts)
        if (u < o.cum) {
            pick = &o;
            break;
        }
    return {pick->to, pick->jump ? pick->jump->sample(rng) : 0.0};
}

int PathStepper::draw_stationary(std::mt19937_64& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t s = 0; s < pi_cum_.size(); ++s)
        if (u < pi_cum_[s]) return static_cast<int>(s);
    return static_cast<int>(pi_cum_.size()) - 1;
}

void first_passages(const PathStepper& st, std::mt19937_64& rng, int start, const std::vector<double>& levels,
                    double floor_gap, std::vector<Passage>& out) {
    constexpr long long kEventCap = 100'000'000;
    out.assign(levels.size(), Passage{});
    std::size_t next = 0;
    const std::size_t nl = levels.size();
    double y = 0.0;
    int s = start;
    if (st.velocity(s) > 0)
        while (next < nl && levels[next] <= 0.0) {
            out[next] = {s, -levels[next]};
            ++next;
        }
    for (long long ev = 0; next < nl && ev < kEventCap; ++ev) {
        const double t = st.holding(s, rng);
        const double v = st.velocity(s);
        y += v * t;
        if (v > 0) {
            while (next < nl && levels[next] <= y) out[next++] = {s, 0.0};
            if (next == nl) return;
        } else if (y < levels[next] - floor_gap) {
            return;
        }
        const auto mv = st.move(s, rng);
        s = mv.to;
        if (mv.jump > 0) {
            y += mv.jump;
            while (next < nl && levels[next] <= y) {
                out[next] = {s, y - levels[next]};
                ++next;
            }
        }
    }
}

int first_descent(const PathStepper& st, std::mt19937_64& rng, int start) {
    constexpr long long kEventCap = 100'000'000;
    double y = 0.0;
    int s = start;
    for (long long ev = 0; ev < kEventCap; ++ev) {
        if (st.velocity(s) < 0 && y <= 0.0) return s;
        const double t = st.holding(s, rng);
        y += st.velocity(s) * t;
        if (y < 0.0) return s;
        const auto mv = st.move(s, rng);
        s = mv.to;
        y += mv.jump;
    }
    return -1;
}

}  // namespace detail

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t r) { return std::mt19937_64(splitmix64(seed ^ r)); }

Estimate binomial_estimate(long long successes, long long reps, double confidence) {
    Estimate e;
    e.reps = reps;
    e.confidence = confidence;
    if (reps <= 0) return e;
    const double n = static_cast<double>(reps), k = static_cast<double>(successes);
    e.value = k / n;
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / n);
    const double tail = 0.5 * (1.0 - confidence);
    e.lo = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1), tail);
    e.hi = successes == reps ? 1.0
                             : boost::math::quantile(boost::math::beta_distribution<double>(k + 1, n - k), 1.0 - tail);
    return e;
}

double dkw_epsilon(long long n, double confidence) {
    return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

std::vector<PathEvent> simulate_path(const MapModel& model, std::mt19937_64& rng, int start, double horizon) {
    const detail::PathStepper st(model);
    std::vector<PathEvent> events;
    double t = 0.0, y = 0.0;
    int s = start;
    while (true) {
        const double dt = st.holding(s, rng);
        if (t + dt > horizon) break;
        t += dt;
        y += st.velocity(s) * dt;
        const auto mv = st.move(s, rng);
        y += mv.jump;
        events.push_back({t, s, mv.to, mv.jump, y});
        s = mv.to;
    }
    return events;
}

void first_passages(const MapModel& model, std::mt19937_64& rng, int start, const std::vector<double>& levels,
                    double floor_gap, std::vector<Passage>& out) {
    detail::first_passages(detail::PathStepper(model), rng, start, levels, floor_gap, out);
}

int first_descent(const MapModel& model, std::mt19937_64& rng, int start) {
    return detail::first_descent(detail::PathStepper(model), rng, start);
}

}  // namespace mapruin
