#pragma once

#include <functional>
#include <vector>

#include "sdesim/mc.hpp"
#include "sdesim/model.hpp"

namespace sdesim {
namespace fk {

// Generator coefficients of the 1-D parabolic equation u_t = c1 u_y + c2 u_yy
// with c1 = Ito drift and c2 = 1/2 sum_i V_i^2.
struct Generator {
    std::function<double(double)> c1;
    std::function<double(double)> c2;
};
Generator build_generator(const SdeModel& model);

struct FkProblem {
    SdeModel model;
    std::function<double(double)> f;
    double t = 1.0;
    double y_lo = -3.0;
    double y_hi = 3.0;
    int n_y = 301;
    int n_t = 0;  // 0 -> derived from the stability bound
    // optional Dirichlet data u(t, boundary); default is one-sided extrapolation
    std::function<double(double y, double t)> boundary;
};

struct PdeSolution {
    std::vector<double> y;
    std::vector<double> u;
    int n_t_used = 0;
    double value_at(double yq) const;  // linear interpolation
};

PdeSolution solve_pde(const FkProblem& problem);

struct FkComparison {
    double pde_value = 0.0;
    double pde_err_est = 0.0;  // grid-refinement estimate
    double mc_mean = 0.0;
    double mc_se = 0.0;
    bool pass = false;
};

FkComparison cross_validate(const FkProblem& problem, double y0, int P, std::size_t n_steps,
                            std::uint64_t seed, int threads = 0);

}  // namespace fk
}  // namespace sdesim
