#include "sdesim/model.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace sdesim {

SdeModel make_langevin(double a, double b) {
    if (b < 0.0) throw std::invalid_argument("make_langevin: b must be >= 0");
    SdeModel m;
    m.name = "langevin";
    m.N = 1;
    m.d = 1;
    m.drift_ito = [a](const Vec& y, Vec& out) { out.assign(1, -a * y[0]); };
    m.drift_strat = m.drift_ito;  // additive noise
    const double sb = std::sqrt(b);
    m.diffusion = {[sb](const Vec&, Vec& out) { out.assign(1, sb); }};
    m.ddiffusion = {[](const Vec&, const Vec&, Vec& out) { out.assign(1, 0.0); }};
    m.exact_mean = [a](double y0, double t) { return y0 * std::exp(-a * t); };
    return m;
}

SdeModel make_gbm(double a, double b) {
    SdeModel m;
    m.name = "gbm";
    m.N = 1;
    m.d = 1;
    m.drift_ito = [a](const Vec& y, Vec& out) { out.assign(1, a * y[0]); };
    m.drift_strat = [a, b](const Vec& y, Vec& out) { out.assign(1, (a - 0.5 * b * b) * y[0]); };
    m.diffusion = {[b](const Vec& y, Vec& out) { out.assign(1, b * y[0]); }};
    m.ddiffusion = {[b](const Vec&, const Vec& v, Vec& out) { out.assign(1, b * v[0]); }};
    m.exact_solution = [a, b](double y0, double t, double wT) {
        return y0 * std::exp(a * t + b * wT - 0.5 * b * b * t);
    };
    m.exact_mean = [a](double y0, double t) { return y0 * std::exp(a * t); };
    return m;
}

SdeModel make_heston(const HestonParams& p) {
    if (p.epsilon < 0.0 || p.kappa < 0.0 || p.theta < 0.0 || std::fabs(p.rho) > 1.0)
        throw std::invalid_argument("make_heston: parameter invariants violated");
    SdeModel m;
    m.name = "heston";
    m.N = 2;
    m.d = 2;
    m.heston = p;
    const double eps = p.epsilon, rho = p.rho, kappa = p.kappa, theta = p.theta, mu = p.mu;
    const double rr = std::sqrt(1.0 - rho * rho);
    // full-truncation guard: sqrt(max(0,v)) everywhere the volatility enters
    m.drift_ito = [mu, kappa, theta](const Vec& y, Vec& out) {
        out.assign({mu, kappa * (theta - std::max(0.0, y[1]))});
    };
    m.diffusion = {
        [eps, rho](const Vec& y, Vec& out) {
            const double sv = std::sqrt(std::max(0.0, y[1]));
            out.assign({sv, eps * rho * sv});
        },
        [eps, rr](const Vec& y, Vec& out) {
            const double sv = std::sqrt(std::max(0.0, y[1]));
            out.assign({0.0, eps * rr * sv});
        }};
    return m;
}

SdeModel make_bilinear() {
    SdeModel m;
    m.name = "bilinear";
    m.N = 2;
    m.d = 2;
    // A1, A2 are nilpotent: the Ito and Stratonovich drifts both vanish
    m.drift_ito = [](const Vec& y, Vec& out) { out.assign(y.size(), 0.0); };
    m.drift_strat = m.drift_ito;
    m.diffusion = {
        [](const Vec& y, Vec& out) { out.assign({y[1], 0.0}); },
        [](const Vec& y, Vec& out) { out.assign({0.0, y[0]}); }};
    m.ddiffusion = {
        [](const Vec&, const Vec& v, Vec& out) { out.assign({v[1], 0.0}); },
        [](const Vec&, const Vec& v, Vec& out) { out.assign({0.0, v[0]}); }};
    return m;
}

HestonPdeCoeffs heston_pde_coefficients(const HestonParams& p) {
    HestonPdeCoeffs c;
    c.c_x = [p](double, double) { return p.mu; };
    c.c_v = [p](double, double v) { return p.kappa * (p.theta - v); };
    c.c_xx = [](double, double v) { return 0.5 * v; };
    c.c_xv = [p](double, double v) { return p.rho * p.epsilon * v; };
    c.c_vv = [p](double, double v) { return 0.5 * p.epsilon * p.epsilon * v; };
    return c;
}

SdeModel make_model_by_name(const std::string& name,
                            const std::vector<std::pair<std::string, double>>& params) {
    std::map<std::string, double> kv(params.begin(), params.end());
    auto get = [&](const std::string& k, double dflt) {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    };
    if (name == "langevin") return make_langevin(get("a", 3.0), get("b", 1.4));
    if (name == "gbm") return make_gbm(get("a", 3.0), get("b", 1.4));
    if (name == "heston") {
        HestonParams p;
        p.mu = get("mu", 0.05);
        p.kappa = get("alpha", get("kappa", 2.0));
        p.theta = get("theta", 0.09);
        p.epsilon = get("beta", get("epsilon", 0.1));
        p.rho = get("rho", 0.5);
        return make_heston(p);
    }
    if (name == "linear2d" || name == "bilinear") return make_bilinear();
    throw std::invalid_argument("unknown model: " + name);
}

}  // namespace sdesim
