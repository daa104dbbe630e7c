#pragma once

#include "mapruin/model.hpp"

#include <string>
#include <vector>

namespace mapruin {

/// One measured identity: `value` is a residual or error, `tolerance` the
/// bound it is expected to meet.
struct InvariantCheck {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool pass() const { return value <= tolerance; }
};

/// Evaluates the analytic identity suite on a model: ladder residual,
/// pi-relations, dual consistency, Wiener-Hopf, transform-vs-quadrature,
/// twisted-kernel mass, nu invariance, prefactor consistency, fluid pair.
/// Checks that need a negative drift are skipped otherwise.
std::vector<InvariantCheck> run_invariants(const MapModel& model);

/// The admissible theta points used by the suite.
std::vector<double> invariant_thetas(double bound, double alpha, int count = 10);

}  // namespace mapruin
