#pragma once

#include "mapruin/model.hpp"
#include "mapruin/model_io.hpp"

#include <algorithm>
#include <cmath>

namespace mapruin::testing {

inline MapModel builtin(const char* name) { return validate(builtin_model(name)); }

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double rel_err(const Matrix& a, const Matrix& b) {
    const double s = max_abs(b);
    return max_abs(Matrix(a - b)) / (s > 0 ? s : 1.0);
}

}  // namespace mapruin::testing
