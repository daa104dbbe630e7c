#include "mapruin/jump_mixture.hpp"

#include "mapruin/error.hpp"

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace mapruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double factorial(int n) { return boost::math::factorial<double>(static_cast<unsigned>(n)); }

// int_0^x e^{-a(x-u)} f(u) du for the Erlang(k, rate) density f.
double erlang_smoothed(int k, double rate, double x, double a, double ls) {
    if (x <= 0) return 0.0;
    const double d = a - rate;
    if (d < 0) {
        const double b = -d;
        return std::exp(ls - a * x) * std::pow(rate / b, k) * boost::math::gamma_p(k, b * x);
    }
    if (d == 0) return std::pow(rate * x, k) * std::exp(ls - rate * x) / factorial(k);
    // rate^k/(k-1)! e^{-rate x} J, J = int_0^x u^{k-1} e^{-d(x-u)} du
    const int nn = k - 1;
    const double dx = d * x;
    double j = 0.0;
    if (dx <= 30.0) {
        // e^{-dx} sum_m d^m x^{n+m+1} / (m! (n+m+1)), all terms positive
        double term = std::pow(x, nn + 1);
        for (int m = 0; m < 400; ++m) {
            const double t = term / (nn + m + 1);
            j += t;
            if (t <= 1e-17 * j) break;
            term *= dx / (m + 1);
        }
        return std::pow(rate, k) / factorial(nn) * std::exp(ls - rate * x - dx) * j;
    }
    // sum_m (-1)^{n-m} n!/m! x^m / d^{n-m+1} - (-1)^n n! e^{-dx} / d^{n+1}
    for (int m = 0; m <= nn; ++m)
        j += ((nn - m) % 2 ? -1.0 : 1.0) * factorial(nn) / factorial(m) * std::pow(x, m) / std::pow(d, nn - m + 1);
    j -= (nn % 2 ? -1.0 : 1.0) * factorial(nn) * std::exp(-dx) / std::pow(d, nn + 1);
    return std::pow(rate, k) / factorial(nn) * std::exp(ls - rate * x) * j;
}

// int_0^x e^{-a(x-u)} rate e^{-rate u} du, written with decaying exponentials only.
double exp_smoothed(double rate, double x, double a, double ls) {
    if (x <= 0) return 0.0;
    const double d = a - rate;
    if (d > 0) return rate * std::exp(ls - rate * x) * (-std::expm1(-d * x)) / d;
    if (d < 0) return rate * std::exp(ls - a * x) * (-std::expm1(d * x)) / (-d);
    return rate * x * std::exp(ls - rate * x);
}

}  // namespace

JumpMixture::JumpMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)), abscissa_(kInf) {
    std::vector<ValidationError::Diagnostic> diags;
    auto bad = [&](std::string msg) { diags.push_back({ErrorCode::BadMixture, std::move(msg)}); };
    if (components_.empty()) bad("mixture has no components");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0) || !std::isfinite(c.weight)) bad("negative or non-finite weight");
        total += c.weight;
        std::visit(overloaded{
                       [&](const Atom& at) {
                           if (!(at.location > 0) || !std::isfinite(at.location))
                               bad("atom location must be strictly positive");
                           max_atom_ = std::max(max_atom_, at.location);
                       },
                       [&](const Exponential& e) {
                           if (!(e.rate > 0) || !std::isfinite(e.rate)) bad("exponential rate must be > 0");
                           abscissa_ = std::min(abscissa_, e.rate);
                       },
                       [&](const Erlang& e) {
                           if (e.shape < 1) bad("erlang shape must be >= 1");
                           if (!(e.rate > 0) || !std::isfinite(e.rate)) bad("erlang rate must be > 0");
                           abscissa_ = std::min(abscissa_, e.rate);
                           max_shape_ = std::max(max_shape_, e.shape);
                       },
                   },
                   c.kind);
    }
    if (!components_.empty() && std::abs(total - 1.0) > 1e-12)
        bad("weights sum to " + std::to_string(total) + ", expected 1");
    if (!diags.empty()) throw ValidationError(std::move(diags));
}

JumpMixture JumpMixture::exponential(double rate) { return JumpMixture({{1.0, Exponential{rate}}}); }
JumpMixture JumpMixture::atom(double location) { return JumpMixture({{1.0, Atom{location}}}); }
JumpMixture JumpMixture::erlang(int shape, double rate) { return JumpMixture({{1.0, Erlang{shape, rate}}}); }

std::vector<double> JumpMixture::atom_locations() const {
    std::vector<double> out;
    for (const auto& c : components_)
        if (const auto* a = std::get_if<Atom>(&c.kind)) out.push_back(a->location);
    return out;
}

double JumpMixture::mean() const {
    double m = 0.0;
    for (const auto& c : components_)
        m += c.weight * std::visit(overloaded{
                                       [](const Atom& a) { return a.location; },
                                       [](const Exponential& e) { return 1.0 / e.rate; },
                                       [](const Erlang& e) { return e.shape / e.rate; },
                                   },
                                   c.kind);
    return m;
}

double JumpMixture::mgf(double theta) const {
    if (!(theta < abscissa_))
        throw Error(ErrorCode::AbscissaExceeded,
                    "mgf evaluated at theta=" + std::to_string(theta) + " >= abscissa " +
                        std::to_string(abscissa_));
    double m = 0.0;
    for (const auto& c : components_)
        m += c.weight * std::visit(overloaded{
                                       [&](const Atom& a) { return std::exp(theta * a.location); },
                                       [&](const Exponential& e) { return e.rate / (e.rate - theta); },
                                       [&](const Erlang& e) {
                                           return std::pow(e.rate / (e.rate - theta), e.shape);
                                       },
                                   },
                                   c.kind);
    return m;
}

double JumpMixture::mgf_deriv(double theta) const {
    if (!(theta < abscissa_))
        throw Error(ErrorCode::AbscissaExceeded,
                    "mgf derivative evaluated at theta=" + std::to_string(theta) + " >= abscissa");
    double m = 0.0;
    for (const auto& c : components_)
        m += c.weight *
             std::visit(overloaded{
                            [&](const Atom& a) { return a.location * std::exp(theta * a.location); },
                            [&](const Exponential& e) {
                                const double r = e.rate - theta;
                                return e.rate / (r * r);
                            },
                            [&](const Erlang& e) {
                                const double r = e.rate - theta;
                                return e.shape * std::pow(e.rate / r, e.shape) / r;
                            },
                        },
                        c.kind);
    return m;
}

double JumpMixture::cdf(double x) const { return 1.0 - tail(std::nextafter(x, kInf)); }

double JumpMixture::tail(double x) const {
    if (x <= 0) return 1.0;
    double t = 0.0;
    for (const auto& c : components_)
        t += c.weight * std::visit(overloaded{
                                       [&](const Atom& a) { return a.location >= x ? 1.0 : 0.0; },
                                       [&](const Exponential& e) { return std::exp(-e.rate * x); },
                                       [&](const Erlang& e) {
                                           return boost::math::gamma_q(e.shape, e.rate * x);
                                       },
                                   },
                                   c.kind);
    return t;
}

double JumpMixture::smoothed(double x, double a, double log_scale) const {
    if (x < 0) return 0.0;
    double g = 0.0;
    for (const auto& c : components_)
        g += c.weight * std::visit(overloaded{
                                       [&](const Atom& at) {
                                           return at.location <= x ? std::exp(log_scale - a * (x - at.location)) : 0.0;
                                       },
                                       [&](const Exponential& e) { return exp_smoothed(e.rate, x, a, log_scale); },
                                       [&](const Erlang& e) { return erlang_smoothed(e.shape, e.rate, x, a, log_scale); },
                                   },
                                   c.kind);
    return g;
}

double JumpMixture::smoothed_tail(double x, double a, double log_scale) const {
    if (x <= 0) return 0.0;
    double g = 0.0;
    for (const auto& c : components_)
        g += c.weight *
             std::visit(overloaded{
                            [&](const Atom& at) {
                                const double top = std::min(x, at.location);
                                // int_0^top e^{-a(x-s)} ds
                                if (a == 0) return std::exp(log_scale) * top;
                                return std::exp(log_scale - a * (x - top)) * (-std::expm1(-a * top)) / a;
                            },
                            [&](const Exponential& e) { return exp_smoothed(e.rate, x, a, log_scale) / e.rate; },
                            [&](const Erlang& e) {
                                // P(Y >= s) = sum_{m=1}^{k} f_m(s) / rate, f_m the Erlang(m) density
                                double s = 0.0;
                                for (int m = 1; m <= e.shape; ++m) s += erlang_smoothed(m, e.rate, x, a, log_scale);
                                return s / e.rate;
                            },
                        },
                        c.kind);
    return g;
}

void JumpMixture::check_matrix_abscissa(const Matrix& k) const {
    if (std::isinf(abscissa_)) return;
    const double sa = spectral_abscissa(k);
    if (!(sa < abscissa_))
        throw Error(ErrorCode::SpectralClash, "spectral abscissa " + std::to_string(sa) +
                                                  " of matrix argument reaches mixture rate " +
                                                  std::to_string(abscissa_));
}

Matrix JumpMixture::matrix_mgf(const Matrix& k) const {
    check_matrix_abscissa(k);
    const Index n = k.rows();
    const Matrix id = Matrix::Identity(n, n);
    Matrix out = Matrix::Zero(n, n);
    for (const auto& c : components_) {
        std::visit(overloaded{
                       [&](const Atom& a) { out += c.weight * expm(a.location * k); },
                       [&](const Exponential& e) {
                           out += c.weight * e.rate * (e.rate * id - k).inverse();
                       },
                       [&](const Erlang& e) {
                           const Matrix r = e.rate * (e.rate * id - k).inverse();
                           Matrix p = r;
                           for (int m = 1; m < e.shape; ++m) p = p * r;
                           out += c.weight * p;
                       },
                   },
                   c.kind);
    }
    return out;
}

JumpMixture::PreparedTail JumpMixture::prepare_tail(const Matrix& k) const {
    check_matrix_abscissa(k);
    PreparedTail prepared;
    prepared.k_ = k;
    const Index n = k.rows();
    const Matrix id = Matrix::Identity(n, n);
    for (const auto& c : components_) {
        PreparedTail::Piece piece{c.weight, c.kind, {}};
        auto prep = [&](double rate, int shape) {
            const Matrix r = (rate * id - k).inverse();
            Matrix p = r;
            for (int m = 0; m < shape; ++m) {
                piece.resolvent_powers.push_back(p);
                p = p * r;
            }
        };
        if (const auto* e = std::get_if<Exponential>(&c.kind)) prep(e->rate, 1);
        if (const auto* e = std::get_if<Erlang>(&c.kind)) prep(e->rate, e->shape);
        prepared.pieces_.push_back(std::move(piece));
    }
    return prepared;
}

Matrix JumpMixture::PreparedTail::at(double w, double log_scale) const {
    const Index n = k_.rows();
    Matrix out = Matrix::Zero(n, n);
    for (const auto& piece : pieces_) {
        std::visit(overloaded{
                       [&](const Atom& a) {
                           if (a.location >= w) out += piece.weight * std::exp(log_scale) * expm((a.location - w) * k_);
                       },
                       [&](const Exponential& e) {
                           out += piece.weight * e.rate * std::exp(log_scale - e.rate * w) * piece.resolvent_powers[0];
                       },
                       [&](const Erlang& e) {
                           // e^{-rate w} sum_m rate^k w^{k-1-m} / (k-1-m)! (rate I - K)^{-(m+1)}
                           const double lead = std::pow(e.rate, e.shape) * std::exp(log_scale - e.rate * w);
                           for (int m = 0; m < e.shape; ++m) {
                               const int p = e.shape - 1 - m;
                               const double coef = lead * std::pow(w, p) / factorial(p);
                               out += piece.weight * coef * piece.resolvent_powers[static_cast<std::size_t>(m)];
                           }
                       },
                   },
                   piece.kind);
    }
    return out;
}

Matrix JumpMixture::matrix_tail(double w, const Matrix& k) const { return prepare_tail(k).at(w); }

double JumpMixture::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const MixtureComponent* pick = &components_.back();
    if (components_.size() > 1) {
        double u = unif(rng), acc = 0.0;
        for (const auto& c : components_) {
            acc += c.weight;
            if (u < acc) {
                pick = &c;
                break;
            }
        }
    }
    return std::visit(overloaded{
                          [](const Atom& a) { return a.location; },
                          [&](const Exponential& e) { return std::exponential_distribution<double>(e.rate)(rng); },
                          [&](const Erlang& e) {
                              std::exponential_distribution<double> ex(e.rate);
                              double s = 0.0;
                              for (int m = 0; m < e.shape; ++m) s += ex(rng);
                              return s;
                          },
                      },
                      pick->kind);
}

}  // namespace mapruin
