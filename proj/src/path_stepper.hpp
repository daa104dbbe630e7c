#pragma once

#include "mapruin/simulator.hpp"

#include <random>
#include <vector>

namespace mapruin::detail {

// Embedded jump chain of a model, laid out for fast sampling.
class PathStepper {
public:
    explicit PathStepper(const MapModel& model);

    struct Move {
        int to;
        double jump;
    };

    double velocity(int s) const { return v_[static_cast<std::size_t>(s)]; }
    double holding(int s, std::mt19937_64& rng) const {
        return std::exponential_distribution<double>(rate_[static_cast<std::size_t>(s)])(rng);
    }
    Move move(int s, std::mt19937_64& rng) const;
    int draw_stationary(std::mt19937_64& rng) const;

private:
    struct Option {
        int to;
        double cum;
        const JumpMixture* jump;  // null for a C-transition
    };
    std::vector<double> v_;
    std::vector<double> rate_;
    std::vector<std::vector<Option>> options_;
    std::vector<double> pi_cum_;
};

void first_passages(const PathStepper& st, std::mt19937_64& rng, int start, const std::vector<double>& levels,
                    double floor_gap, std::vector<Passage>& out);
int first_descent(const PathStepper& st, std::mt19937_64& rng, int start);

}  // namespace mapruin::detail
