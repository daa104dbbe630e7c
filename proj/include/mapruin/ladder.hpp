#pragma once

#include "mapruin/model.hpp"

#include <utility>
#include <vector>

namespace mapruin {

struct LadderOptions {
    double step_tol = 1e-12;
    int max_iter = 100000;
};

/// Minimal solution (K, L) of the ascending-ladder matrix equation
///
///     -K (I, L) = int_0^inf e^{uK} (I, L) (C(du) + D(du)) Delta_v^{-1},
///
/// together with the dual objects (Qdual, Rdual) and, when the drift is
/// nonpositive, the right null vector k- of K normalized by pi- k- = 1.
struct LadderSolution {
    Matrix K;         ///< |S-| x |S-|, ML
    Matrix L;         ///< |S-| x |S+|, nonnegative
    Vector kminus;    ///< empty when the drift is positive
    Matrix Qdual;     ///< |S-| x |S-| subrate
    Matrix Rdual;     ///< |S+| x |S-| substochastic
    RowVector pi;     ///< stationary distribution of C + D
    double drift = 0; ///< E(Y(1))
    double residual = 0;
    int iterations = 0;
};

/// Minimal solution (Q, R) of the descending first-passage equation in row
/// form,
///
///     -(I; R) Q = Delta_v^{-1} int_0^inf (C(du) + D(du)) (I; R) e^{uQ}.
///
/// Applied to the dual model this yields (Qdual, Rdual) independently of the
/// ladder route; applied to the model itself it gives the fluid-queue pair.
struct DescendingSolution {
    Matrix Q;  ///< |S-| x |S-|
    Matrix R;  ///< |S+| x |S-|
    double residual = 0;
    int iterations = 0;
};

LadderSolution solve_ladder(const MapModel& model, const LadderOptions& opt = {});
DescendingSolution solve_descending(const MapModel& model, const LadderOptions& opt = {});

/// Sup-norm residual of the ladder equation at (K, L).
double ladder_residual(const MapModel& model, const Matrix& K, const Matrix& L);
/// Sup-norm residual of the row-form equation at (Q, R).
double descending_residual(const MapModel& model, const Matrix& Q, const Matrix& R);

/// Qdual = Delta_{pi-}^{-1} K' Delta_{pi-},  Rdual = Delta_{pi+}^{-1} L' Delta_{pi-}.
std::pair<Matrix, Matrix> dual_ladder(const RowVector& pi, const Partition& part, const Matrix& K,
                                      const Matrix& L);

/// Right null vector of K with pi- k = 1; throws DriftPositive if drift > 0.
Vector k_eigenvector(const MapModel& model, const Matrix& K);
/// Same, without the drift precondition check.
Vector k_eigenvector(const Matrix& K, const RowVector& pi_minus);

/// The ascending-ladder integrand W(w) = int_{[w,inf)} e^{(y-w)K} (I, L) D(dy),
/// an |S-| x n matrix in original column order.
class LadderTail {
public:
    LadderTail(const MapModel& model, const Matrix& K, const Matrix& L);

    Matrix at(double w, double log_scale = 0.0) const;
    /// int_a^b W(w) dw by adaptive Gauss-Legendre split at the atoms.
    Matrix integral(double a, double b, double abs_tol = 0.0) const;
    /// Upper limit used for integrals to infinity (W < 1e-17 beyond it).
    double cutoff() const noexcept { return cutoff_; }
    const std::vector<double>& breaks() const noexcept { return breaks_; }

private:
    struct Term {
        int from, to;
        double rate;
        JumpMixture::PreparedTail tail;
    };
    Matrix E_;  // (I, L) in original column order
    int n_;
    std::vector<Term> terms_;
    std::vector<double> breaks_;
    double cutoff_;
};

/// Row i (i in S-) of P(M(tau_0^+) = j, Y(tau_0^+) <= x | M(0) = i); x may be +inf.
RowVector ladder_height(const MapModel& model, const LadderSolution& ladder, int i, double x);
RowVector ladder_height(const MapModel& model, const LadderSolution& ladder, const LadderTail& tail,
                        int i, double x);

}  // namespace mapruin
