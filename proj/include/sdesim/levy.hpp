#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sdesim/rng.hpp"

namespace sdesim {
namespace levy {

// Conditioning data for one step: the Levy area A12 is sampled given the
// step's Wiener increments.
struct LevyContext {
    double h = 1.0;
    double dW1 = 0.0;
    double dW2 = 0.0;
    double a2() const { return (dW1 * dW1 + dW2 * dW2) / h; }
};

inline int auto_q_kl(double h) { return static_cast<int>(std::ceil(1.0 / h)); }
inline int auto_q_rw(double h) { return static_cast<int>(std::ceil(1.0 / std::sqrt(h))); }

// Characteristic function of the conditional Levy-area density:
//   (z/sinh z) * exp(-a^2/2 (z coth z - 1)),  z = h*xi/2.
double char_function(const LevyContext& ctx, double xi);

// Characteristic function of the unconditional area at step h (increments
// integrated out): 1/cosh(h*xi/2).
double char_function_unconditional(double h, double xi);

// Inverse-Fourier quadrature oracle for the conditional (or unconditional)
// density and CDF.
class DensityOracle {
public:
    explicit DensityOracle(const LevyContext& ctx);
    static DensityOracle unconditional(double h);
    double density(double x) const;
    double cdf(double x) const;
    double second_moment() const;  // -phi_hat''(0) by central difference
    double xi_max() const { return xi_max_; }

private:
    double char_fn(double xi) const;
    double cosine_integral(double x, bool sine_over_xi) const;
    void truncate();
    LevyContext ctx_;
    bool unconditional_ = false;
    double xi_max_ = 0.0;
};

// Kolmogorov-Smirnov distance of a sample against a CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

// Truncated Karhunen-Loeve series sampler, Q terms.
double sample_kl(RngStream& stream, const LevyContext& ctx, int Q);

// Logistic + compound-Poisson-Laplace sampler with a Normal tail surrogate
// of matched variance, Q retained frequencies.
double sample_rw(RngStream& stream, const LevyContext& ctx, int Q);

// Conditional-expectation approximation from a fresh 2-D sub-path of Q
// Gaussian increments. Returns the whole-step increments and J12_hat.
struct CondSample {
    double dW1 = 0.0;
    double dW2 = 0.0;
    double j12_hat = 0.0;
    double area() const { return j12_hat - 0.5 * dW1 * dW2; }
};
CondSample sample_conditional(RngStream& stream, double h, int Q);

// J12_hat from an already-realized pair of sub-increment sequences.
double j12_hat_from_increments(const double* dw1, const double* dw2, std::size_t q);

// J_ij = 1/2 dWi dWj + A_ij,  J_ji = dWi dWj - J_ij.
inline std::pair<double, double> j_pair_from_area(double dWi, double dWj, double Aij) {
    const double jij = 0.5 * dWi * dWj + Aij;
    return {jij, dWi * dWj - jij};
}
inline double j_diag(double dWi) { return 0.5 * dWi * dWi; }

}  // namespace levy
}  // namespace sdesim
