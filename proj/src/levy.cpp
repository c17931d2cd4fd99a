#include "sdesim/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdesim {
namespace levy {

namespace {

// z/sinh(z), stable for small and large |z|.
double z_over_sinh(double z) {
    const double az = std::fabs(z);
    if (az < 1e-4) return 1.0 - z * z / 6.0;
    if (az > 700.0) return 0.0;
    return z / std::sinh(z);
}

// z*coth(z) - 1, even in z.
double z_coth_minus_one(double z) {
    const double az = std::fabs(z);
    if (az < 1e-4) return z * z / 3.0;
    if (az > 700.0) return az - 1.0;
    return z / std::tanh(z) - 1.0;
}

}  // namespace

double char_function(const LevyContext& ctx, double xi) {
    const double z = 0.5 * ctx.h * xi;
    return z_over_sinh(z) * std::exp(-0.5 * ctx.a2() * z_coth_minus_one(z));
}

double char_function_unconditional(double h, double xi) {
    const double z = 0.5 * h * xi;
    if (std::fabs(z) > 700.0) return 0.0;
    return 1.0 / std::cosh(z);
}

double DensityOracle::char_fn(double xi) const {
    return unconditional_ ? char_function_unconditional(ctx_.h, xi) : char_function(ctx_, xi);
}

void DensityOracle::truncate() {
    // phi_hat decays exponentially; truncate where it drops below 1e-12.
    double xi = 2.0 / ctx_.h;
    while (char_fn(xi) > 1e-12) xi *= 2.0;
    double lo = xi / 2.0, hi = xi;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (char_fn(mid) > 1e-12) lo = mid; else hi = mid;
    }
    xi_max_ = hi;
}

DensityOracle::DensityOracle(const LevyContext& ctx) : ctx_(ctx) { truncate(); }

DensityOracle DensityOracle::unconditional(double h) {
    DensityOracle o{LevyContext{h, 0.0, 0.0}};
    o.unconditional_ = true;
    o.truncate();
    return o;
}

double DensityOracle::cosine_integral(double x, bool sine_over_xi) const {
    // composite Simpson on [0, xi_max], node count tied to the oscillation
    // frequency of cos(x xi) / sin(x xi)
    const double periods = std::fabs(x) * xi_max_ / (2.0 * RngStream::pi());
    std::size_t n = static_cast<std::size_t>(std::max(4000.0, 40.0 * periods));
    if (n % 2 == 1) ++n;
    const double dxi = xi_max_ / static_cast<double>(n);
    auto f = [&](double xi) {
        const double ph = char_fn(xi);
        if (!sine_over_xi) return ph * std::cos(x * xi);
        if (xi < 1e-12) return x;  // sin(x xi)/xi -> x
        return ph * std::sin(x * xi) / xi;
    };
    double s = f(0.0) + f(xi_max_);
    for (std::size_t k = 1; k < n; ++k)
        s += f(dxi * static_cast<double>(k)) * ((k % 2 == 1) ? 4.0 : 2.0);
    return s * dxi / 3.0;
}

double DensityOracle::density(double x) const {
    return cosine_integral(x, false) / RngStream::pi();
}

double DensityOracle::cdf(double x) const {
    return 0.5 + cosine_integral(x, true) / RngStream::pi();
}

double DensityOracle::second_moment() const {
    const double eps = 2e-4 / ctx_.h;
    return -2.0 * (char_fn(eps) - 1.0) / (eps * eps);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double fx = cdf(samples[i]);
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - fx));
        d = std::max(d, std::fabs(static_cast<double>(i) / n - fx));
    }
    return d;
}

double sample_kl(RngStream& stream, const LevyContext& ctx, int Q) {
    if (Q < 1) throw std::invalid_argument("sample_kl: Q must be >= 1");
    const double c1 = std::sqrt(2.0 / ctx.h) * ctx.dW1;
    const double c2 = std::sqrt(2.0 / ctx.h) * ctx.dW2;
    double s = 0.0;
    for (int k = 1; k <= Q; ++k) {
        const auto [u, v] = stream.normal_pair();
        const auto [x, y] = stream.normal_pair();
        s += (u * (y - c2) - v * (x - c1)) / static_cast<double>(k);
    }
    return ctx.h / (2.0 * RngStream::pi()) * s;
}

double sample_rw(RngStream& stream, const LevyContext& ctx, int Q) {
    if (Q < 1) throw std::invalid_argument("sample_rw: Q must be >= 1");
    const double scale = ctx.h / (2.0 * RngStream::pi());
    // logistic part X(h)
    const double u = stream.uniform01_open_both();
    double s = std::log(u / (1.0 - u));
    // compound Poisson part of Y(h), frequencies k <= Q
    const double a2 = ctx.a2();
    for (int k = 1; k <= Q; ++k) {
        const long nk = stream.poisson(a2);
        for (long j = 0; j < nk; ++j) s += stream.laplace(1.0 / static_cast<double>(k));
    }
    // Normal tail surrogate: Var(sum_{k>Q} sum_j Y_jk) = a^2 * sum_{k>Q} 2/k^2
    double tail_sum = RngStream::pi() * RngStream::pi() / 6.0;
    for (int k = 1; k <= Q; ++k) tail_sum -= 1.0 / (static_cast<double>(k) * k);
    s += std::sqrt(2.0 * a2 * tail_sum) * stream.normal();
    return scale * s;
}

double j12_hat_from_increments(const double* dw1, const double* dw2, std::size_t q) {
    double w1 = 0.0, j = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        j += w1 * dw2[i];
        w1 += dw1[i];
    }
    return j;
}

CondSample sample_conditional(RngStream& stream, double h, int Q) {
    if (Q < 1) throw std::invalid_argument("sample_conditional: Q must be >= 1");
    if (!(h > 0.0)) throw std::invalid_argument("sample_conditional: h must be > 0");
    const double dt = h / static_cast<double>(Q);
    const double sdt = std::sqrt(dt);
    CondSample out;
    double w1 = 0.0;
    for (int q = 0; q < Q; ++q) {
        const double x = sdt * stream.normal();
        const double y = sdt * stream.normal();
        out.j12_hat += w1 * y;
        w1 += x;
        out.dW1 += x;
        out.dW2 += y;
    }
    return out;
}

}  // namespace levy
}  // namespace sdesim
