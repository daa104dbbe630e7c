#pragma once

#include "mapruin/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace mapruin {

/// One transition of the background chain.
struct PathEvent {
    double time;
    int from;
    int to;
    double jump;   ///< 0 for C-transitions
    double level;  ///< Y right after the event
};

/// Point estimate with binomial-exact (Clopper-Pearson) interval for
/// probability estimands.
struct Estimate {
    double value = 0;
    double std_error = 0;
    long long reps = 0;
    double confidence = 0.99;
    double lo = 0;
    double hi = 0;
};

Estimate binomial_estimate(long long successes, long long reps, double confidence = 0.99);

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Generator for replication r of a run seeded with `seed`.
std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t r);

/// Events of (M, Y) on [0, horizon] from M(0) = start, Y(0) = 0.
std::vector<PathEvent> simulate_path(const MapModel& model, std::mt19937_64& rng, int start, double horizon);

/// First passage of Y above each level of an ascending list, from Y(0) = 0.
struct Passage {
    int state = -1;          ///< M at the passage, -1 if never (or truncated)
    double overshoot = 0.0;  ///< Y(tau_x^+) - x
};

/// Runs one path until every level is passed or Y drops more than
/// `floor_gap` below the lowest level still open. A level equal to 0 counts as
/// passed at time 0 only when v(start) > 0.
void first_passages(const MapModel& model, std::mt19937_64& rng, int start, const std::vector<double>& levels,
                    double floor_gap, std::vector<Passage>& out);

/// State at the first time Y < 0, starting from Y(0) = 0 in `start`
/// (-1 if the cap on events is hit).
int first_descent(const MapModel& model, std::mt19937_64& rng, int start);

struct RunOptions {
    std::uint64_t seed = 1;
    long long reps = 100000;
    bool parallel = true;
};

struct HittingEstimate {
    std::vector<double> levels;
    int start = 0;
    std::vector<std::vector<Estimate>> by_state;  ///< [level][j]
    std::vector<Estimate> never;                  ///< [level]
    double truncation_bound = 0;                  ///< Lundberg bound on the bias
};

/// Psi_{start, j}(x) for each x in `levels` (one path serves all levels).
HittingEstimate estimate_hitting(const MapModel& model, const std::vector<double>& levels, int start,
                                 const RunOptions& opt);
/// Same, with the replication loop forced serial.
HittingEstimate estimate_hitting_serial(const MapModel& model, const std::vector<double>& levels, int start,
                                        const RunOptions& opt);

/// Raw ascending-ladder draws (M(tau_0^+), Y(tau_0^+)) from M(0) = start in S-.
struct LadderSample {
    int start = 0;
    std::vector<int> state;      ///< -1 when the ladder epoch never comes
    std::vector<double> height;
    double truncation_bound = 0;

    /// Fraction of draws with state j and height <= x.
    double cdf(int j, double x) const;
    double mass(int j) const;
};

LadderSample estimate_ladder(const MapModel& model, int start, const RunOptions& opt);

/// sqrt(ln(2 / (1 - confidence)) / (2 n)).
double dkw_epsilon(long long n, double confidence = 0.99);

struct DualityReport {
    Matrix lhs;     ///< -v(i) P(M(0)=i, M(tau_0^+)=k), |S-| x |S+|
    Matrix rhs;     ///< v(k) P(M~(0)=k, M~(tau~_0^-)=i)
    Matrix z;       ///< two-sample z-scores
    Estimate hit;   ///< P(tau_0^+ < inf) from the down-crossing start
    double ratio = 0;  ///< a+/a- (capped at 1)
    double z_hit = 0;
};

/// Both sides of the no-jump duality identity; throws HasJumps if D != 0.
DualityReport check_duality_nojump(const MapModel& model, const RunOptions& opt);

struct FluidEstimate {
    std::vector<double> levels;
    double horizon = 0;
    std::vector<std::vector<Estimate>> by_state;  ///< [level][i] P(V > x, M = i)
    std::vector<Estimate> total;                  ///< [level] P(V > x)
};

/// Loynes: V(t) reflected at 0 from V(0) = 0, M(0) ~ pi, read at t = horizon.
FluidEstimate estimate_fluid_tail(const MapModel& model, const std::vector<double>& levels, double horizon,
                                  const RunOptions& opt);

}  // namespace mapruin
