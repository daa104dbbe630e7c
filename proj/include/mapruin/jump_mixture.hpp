#pragma once

#include "mapruin/linalg.hpp"

#include <random>
#include <variant>
#include <vector>

namespace mapruin {

/// Point mass at a strictly positive level.
struct Atom {
    double location;
};

struct Exponential {
    double rate;
};

/// Sum of `shape` iid Exponential(rate) variables.
struct Erlang {
    int shape;
    double rate;
};

using ComponentKind = std::variant<Atom, Exponential, Erlang>;

struct MixtureComponent {
    double weight;
    ComponentKind kind;
};

/// Finite mixture of atoms, exponentials and Erlangs on (0, inf).
///
/// Every transform the kernels need (mgf, matrix mgf, matrix tail integral,
/// the exponentially smoothed CDF) has a closed form for this family, which
/// is what makes the ladder and renewal kernels exactly computable.
class JumpMixture {
public:
    /// Validates weights (nonnegative, sum to one within 1e-12) and
    /// parameters; throws ValidationError{BadMixture} otherwise.
    explicit JumpMixture(std::vector<MixtureComponent> components);

    static JumpMixture exponential(double rate);
    static JumpMixture atom(double location);
    static JumpMixture erlang(int shape, double rate);

    const std::vector<MixtureComponent>& components() const noexcept { return components_; }

    /// mgf abscissa: smallest Exponential/Erlang rate, +inf for atoms only.
    double abscissa() const noexcept { return abscissa_; }
    double max_atom() const noexcept { return max_atom_; }
    int max_shape() const noexcept { return max_shape_; }
    std::vector<double> atom_locations() const;

    double mean() const;
    double mgf(double theta) const;
    double mgf_deriv(double theta) const;

    double cdf(double x) const;
    /// P(Y >= x); atoms at x count as part of the tail.
    double tail(double x) const;

    /// g(x; a) = int_{[0,x]} e^{-a(x-u)} F(du).
    /// The optional `log_scale` s multiplies the result by e^s inside the
    /// exponentials, so e^{theta x} g stays representable where g underflows.
    double smoothed(double x, double a, double log_scale = 0.0) const;
    /// int_0^x e^{-a(x-s)} P(Y >= s) ds.
    double smoothed_tail(double x, double a, double log_scale = 0.0) const;

    /// int e^{uK} F(du) for a square K whose spectral abscissa is below
    /// every rate; throws SpectralClash otherwise.
    Matrix matrix_mgf(const Matrix& k) const;

    /// int_{[w, inf)} e^{(y-w)K} F(dy).
    Matrix matrix_tail(double w, const Matrix& k) const;

    /// Pre-factored form of `matrix_tail` for repeated evaluation at a fixed K.
    class PreparedTail {
    public:
        Matrix at(double w, double log_scale = 0.0) const;

    private:
        friend class JumpMixture;
        struct Piece {
            double weight;
            ComponentKind kind;
            std::vector<Matrix> resolvent_powers;  // (rate I - K)^{-(m+1)}
        };
        Matrix k_;
        std::vector<Piece> pieces_;
    };
    PreparedTail prepare_tail(const Matrix& k) const;

    double sample(std::mt19937_64& rng) const;

private:
    void check_matrix_abscissa(const Matrix& k) const;

    std::vector<MixtureComponent> components_;
    double abscissa_;
    double max_atom_ = 0.0;
    int max_shape_ = 1;
};

}  // namespace mapruin
