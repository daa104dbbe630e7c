#pragma once

#include "mapruin/model.hpp"

#include <span>

namespace mapruin {

/// How mu was scaled: by mu- k- = 1, or (when k- is unavailable
/// because the drift is positive) by mu e = 1.
enum class Normalization { KMinus, UnitSum };

/// Perron data of A(theta) = C + D_hat(theta) + theta Delta_v.
struct SpectralPoint {
    double theta = 0;
    double kappa = 0;
    RowVector mu;
    Vector h;   ///< mu h = 1
    Normalization normalization = Normalization::KMinus;
};

Matrix A_of_theta(const MapModel& model, double theta);

/// Dominant eigenvalue and positive eigenvectors. `kminus` may be empty, in
/// which case mu is scaled to unit sum.
SpectralPoint perron(const MapModel& model, double theta, const Vector& kminus);

/// Same, for an arbitrary irreducible ML matrix.
SpectralPoint perron_of(const Matrix& a, const Vector& kminus, std::span<const int> minus);

/// kappa'(theta) = mu (Delta_v + D_hat'(theta)) h.
double kappa_prime(const MapModel& model, const SpectralPoint& point);

struct DecayOptions {
    double width = 1e-13;  ///< bisection stops at this bracket width
};

/// Unique alpha > 0 with kappa(alpha) = 0. Throws DriftNonNegative or NoRoot.
double decay_rate(const MapModel& model, const DecayOptions& opt = {});

/// Admissible upper end for theta in A(theta): min of the mixture abscissas.
double theta_max(const MapModel& model);

}  // namespace mapruin
