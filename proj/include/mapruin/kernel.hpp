#pragma once

#include "mapruin/ladder.hpp"
#include "mapruin/model.hpp"

#include <vector>

namespace mapruin {

/// Everything the semi-Markov kernel needs, prepared once per model.
class KernelContext {
public:
    explicit KernelContext(MapModel model, const LadderOptions& opt = {});
    KernelContext(MapModel model, LadderSolution ladder);

    const MapModel& model() const noexcept { return model_; }
    const Partition& partition() const noexcept { return model_.partition(); }
    const LadderSolution& ladder() const noexcept { return ladder_; }
    const LadderTail& tail() const noexcept { return tail_; }

    /// Rate a_k = c(k)/v(k) of the exponential sojourn level for k in S+.
    double sojourn_rate(int k) const { return model_.c(k) / model_.v()(k); }

    /// g_kj(y) = int_{[0,y]} e^{-a_k (y-u)} U_kj(du), k in S+.
    double g(int k, int j, double y, double log_scale = 0.0) const;
    /// int_0^x e^{-a_k (x-s)} U_kj([s, inf)) ds, k in S+.
    double g_bar(int k, int j, double x, double log_scale = 0.0) const;
    /// U_kj([0, x]).
    double u_cdf(int k, int j, double x) const;

    /// Smallest exponential rate governing the decay of h and Gbar.
    double decay_envelope() const noexcept { return envelope_; }
    /// Level beyond which h(y) e^{theta y} is negligible (< eps).
    double cutoff(double theta, double eps = 1e-14) const;

    /// int_0^inf W(w) dw (|S-| x n), closed form when K admits it.
    const Matrix& tail_total() const noexcept { return tail_total_; }

    std::vector<double> breaks() const;

private:
    void prepare();

    MapModel model_;
    LadderSolution ladder_;
    LadderTail tail_;
    Matrix tail_total_;
    double envelope_ = 0.0;
};

/// H(x): rows in S- through the ladder integrand, rows in S+ through the
/// exponential sojourn. H(0) = 0.
Matrix H_at(const KernelContext& ctx, double x);

/// dH/dy at y > 0, times e^{theta y}.
Matrix H_density(const KernelContext& ctx, double y, double theta = 0.0);

/// H(inf), the total kernel mass.
Matrix H_total(const KernelContext& ctx);

/// Overshoot kernel Gbar(x).
Matrix Gbar_at(const KernelContext& ctx, double x);
/// e^{theta x} Gbar(x), given w_upper = e^{theta x} int_x^inf W dw.
Matrix Gbar_from_tail(const KernelContext& ctx, double x, const Matrix& w_upper, double theta = 0.0);

/// Upper end of the admissible theta range for H_hat and T.
double theta_bound(const KernelContext& ctx);

/// T(theta) and its explicit inverse (n x n, original ordering).
Matrix T_of_theta(const KernelContext& ctx, double theta);
Matrix T_inverse(const KernelContext& ctx, double theta);

/// H_hat(theta) = I - Delta_v^{-1} T(theta) A(theta); theta = 0 gives H(inf).
Matrix H_hat(const KernelContext& ctx, double theta);

/// Sup-norm of T(theta)^{-1} Delta_v (I - H_hat(theta)) - A(theta).
double wiener_hopf_residual(const KernelContext& ctx, double theta);

/// int_0^inf e^{alpha x} Gbar(x) dx in closed form. Requires k- (drift <= 0).
Matrix Gbar_transform(const KernelContext& ctx, double alpha);

/// Quadrature oracles used by the consistency checks.
Matrix H_hat_quadrature(const KernelContext& ctx, double theta, double abs_tol = 1e-12);
/// Composite rule on panels of the given width.
Matrix Gbar_transform_quadrature(const KernelContext& ctx, double alpha, double width = 0.25);

}  // namespace mapruin
