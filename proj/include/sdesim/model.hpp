#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdesim/algebra.hpp"

namespace sdesim {

using Vec = algebra::Vec;
using Field = algebra::Field;
using DField = algebra::DField;

struct HestonParams {
    double mu = 0.05;
    double kappa = 2.0;    // alpha in the reference parameter block
    double theta = 0.09;
    double epsilon = 0.1;  // beta
    double rho = 0.5;
};

// Autonomous SDE: N-dimensional state, d driving noises. Drift is carried in
// both conventions; drift_strat is derived when not supplied.
struct SdeModel {
    std::string name;
    int N = 1;
    int d = 1;
    Field drift_ito;
    Field drift_strat;                 // optional; derived if null
    std::vector<Field> diffusion;      // V_i, i=1..d
    std::vector<DField> ddiffusion;    // dV_i(y)[v]; FD fallback when empty/null

    // scalar-model extras
    std::function<double(double y0, double t, double wT)> exact_solution;
    std::function<double(double y0, double t)> exact_mean;

    std::optional<HestonParams> heston;

    void strat_drift(const Vec& y, Vec& out) const {
        if (drift_strat) { drift_strat(y, out); return; }
        out = algebra::ito_drift_to_strat(drift_ito, diffusion, ddiffusion, y);
    }
};

// dy = -a y dt + sqrt(b) dW  (Ornstein-Uhlenbeck)
SdeModel make_langevin(double a, double b);

// dy = a y dt + b y dW, exact solution y0 exp(a t + b W_t - b^2 t / 2)
SdeModel make_gbm(double a, double b);

// Heston in (x = log S, v) coordinates for the generator; simulated in
// (S, v) by the full-truncation stepper.
SdeModel make_heston(const HestonParams& p);

// Non-commuting bilinear 2-noise testbed:
//   dy = A1 y o dW1 + A2 y o dW2,  A1 = [[0,1],[0,0]], A2 = [[0,0],[1,0]].
SdeModel make_bilinear();

// Coefficients of u_t = mu u_x + kappa(theta - v) u_v
//                     + v/2 u_xx + rho eps v u_xv + eps^2 v / 2 u_vv.
struct HestonPdeCoeffs {
    std::function<double(double x, double v)> c_x, c_v, c_xx, c_xv, c_vv;
};
HestonPdeCoeffs heston_pde_coefficients(const HestonParams& p);

SdeModel make_model_by_name(const std::string& name,
                            const std::vector<std::pair<std::string, double>>& params);

}  // namespace sdesim
