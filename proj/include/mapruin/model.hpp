#pragma once

#include "mapruin/jump_mixture.hpp"
#include "mapruin/linalg.hpp"

#include <optional>
#include <vector>

namespace mapruin {

/// Split of the state space by the sign of the drift rate. Both lists are
/// ascending; every block matrix in the library orders S- first, then S+.
struct Partition {
    std::vector<int> minus;
    std::vector<int> plus;

    int n_minus() const noexcept { return static_cast<int>(minus.size()); }
    int n_plus() const noexcept { return static_cast<int>(plus.size()); }
};

/// Unvalidated model description, as read from a file or built in code.
struct RawModel {
    struct Jump {
        int from;
        int to;
        std::vector<MixtureComponent> mixture;
    };

    int states = 0;
    std::vector<double> v;
    std::vector<std::vector<double>> C;
    std::vector<std::vector<double>> D;
    std::vector<Jump> jumps;
};

/// Validated, immutable Markov additive process with signed linear drift
/// `v`, jump-free transition rates `C` and jump-carrying rates `D`.
class MapModel {
public:
    int n() const noexcept { return static_cast<int>(v_.size()); }
    const Vector& v() const noexcept { return v_; }
    const Matrix& C() const noexcept { return c_; }
    const Matrix& D() const noexcept { return d_; }
    const Partition& partition() const noexcept { return partition_; }

    /// Jump-size law attached to D_ij, if D_ij > 0.
    const JumpMixture* jump(int i, int j) const;

    /// Total event rate out of state i, c(i) = -C_ii.
    double c(int i) const { return -c_(i, i); }

    /// Generator of the background chain, C + D.
    Matrix generator() const { return c_ + d_; }

    /// Total mass of the transition measure U_ij: 1(i!=j) C_ij + D_ij.
    double u_mass(int i, int j) const { return (i != j ? c_(i, j) : 0.0) + d_(i, j); }

    /// Smallest mgf abscissa over all jump mixtures (+inf if none binds).
    double jump_abscissa() const noexcept { return jump_abscissa_; }

    /// Largest atom location over all jump mixtures (0 if none).
    double max_atom() const noexcept;
    int max_shape() const noexcept;
    std::vector<double> atom_locations() const;

    /// Entrywise D_ij * E[e^{theta Y_ij}], the matrix mgf of D(dx).
    Matrix D_hat(double theta) const;
    /// d/dtheta D_hat.
    Matrix D_hat_deriv(double theta) const;
    /// int y D(dy).
    Matrix D_mean() const;

    bool has_jumps() const noexcept { return d_.size() > 0 && d_.maxCoeff() > 0.0; }

    friend MapModel validate(const RawModel& raw);
    friend MapModel dual_model(const MapModel& model);

private:
    MapModel() = default;
    void finish();

    Vector v_;
    Matrix c_;
    Matrix d_;
    std::vector<std::optional<JumpMixture>> jumps_;  // row-major n*n
    Partition partition_;
    double jump_abscissa_ = 0.0;
};

/// Validates every invariant and returns the model, or throws
/// ValidationError listing each violation.
MapModel validate(const RawModel& raw);

/// Stationary distribution of C + D (row vector, pi (C + D) = 0, pi e = 1).
RowVector stationary_dist(const MapModel& model);

/// E(Y(1)) = pi Delta_v e + pi (int y D(dy)) e.
double mean_drift(const MapModel& model);

/// Time-reversed model: C~ = Delta_pi^{-1} C' Delta_pi, same for D, F~_jk = F_kj.
MapModel dual_model(const MapModel& model);

}  // namespace mapruin
