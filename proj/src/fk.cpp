#include "sdesim/fk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdesim {
namespace fk {

Generator build_generator(const SdeModel& model) {
    if (model.N != 1)
        throw std::invalid_argument("build_generator: only scalar models (N=1) are supported");
    Generator g;
    g.c1 = [drift = model.drift_ito](double y) {
        Vec out(1);
        drift(Vec{y}, out);
        return out[0];
    };
    g.c2 = [diff = model.diffusion](double y) {
        Vec out(1);
        double s = 0.0;
        for (const auto& vi : diff) {
            vi(Vec{y}, out);
            s += out[0] * out[0];
        }
        return 0.5 * s;
    };
    return g;
}

double PdeSolution::value_at(double yq) const {
    if (yq < y.front() || yq > y.back())
        throw std::invalid_argument("PdeSolution::value_at: query outside grid");
    const double dy = y[1] - y[0];
    std::size_t i = std::min(static_cast<std::size_t>((yq - y.front()) / dy), y.size() - 2);
    const double w = (yq - y[i]) / dy;
    return (1.0 - w) * u[i] + w * u[i + 1];
}

PdeSolution solve_pde(const FkProblem& problem) {
    if (problem.n_y < 3) throw std::invalid_argument("solve_pde: need n_y >= 3");
    if (!(problem.y_hi > problem.y_lo)) throw std::invalid_argument("solve_pde: bad domain");
    const Generator g = build_generator(problem.model);

    const int ny = problem.n_y;
    const double dy = (problem.y_hi - problem.y_lo) / static_cast<double>(ny - 1);

    PdeSolution sol;
    sol.y.resize(static_cast<std::size_t>(ny));
    sol.u.resize(static_cast<std::size_t>(ny));
    std::vector<double> c1(static_cast<std::size_t>(ny)), c2(static_cast<std::size_t>(ny));
    double dt_max = 1e300;
    for (int i = 0; i < ny; ++i) {
        const double y = problem.y_lo + dy * i;
        sol.y[static_cast<std::size_t>(i)] = y;
        sol.u[static_cast<std::size_t>(i)] = problem.f(y);
        c1[static_cast<std::size_t>(i)] = g.c1(y);
        c2[static_cast<std::size_t>(i)] = g.c2(y);
        if (c2[static_cast<std::size_t>(i)] > 0.0)
            dt_max = std::min(dt_max, dy * dy / (2.0 * c2[static_cast<std::size_t>(i)]));
        if (c1[static_cast<std::size_t>(i)] != 0.0)
            dt_max = std::min(dt_max, dy / std::fabs(c1[static_cast<std::size_t>(i)]));
    }
    dt_max *= 0.4;  // safety factor on the explicit stability limit
    const int n_t_required = static_cast<int>(std::ceil(problem.t / dt_max));
    int n_t = problem.n_t;
    if (n_t == 0) n_t = n_t_required;
    if (n_t < n_t_required)
        throw std::invalid_argument("solve_pde: stability bound violated; need n_t >= " +
                                    std::to_string(n_t_required));
    sol.n_t_used = n_t;
    const double dt = problem.t / static_cast<double>(n_t);

    std::vector<double> un(sol.u.size());
    for (int step = 0; step < n_t; ++step) {
        for (int i = 1; i < ny - 1; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const double uy = (sol.u[ui + 1] - sol.u[ui - 1]) / (2.0 * dy);
            const double uyy = (sol.u[ui + 1] - 2.0 * sol.u[ui] + sol.u[ui - 1]) / (dy * dy);
            un[ui] = sol.u[ui] + dt * (c1[ui] * uy + c2[ui] * uyy);
        }
        const double t_next = dt * static_cast<double>(step + 1);
        if (problem.boundary) {
            un[0] = problem.boundary(sol.y.front(), t_next);
            un[sol.u.size() - 1] = problem.boundary(sol.y.back(), t_next);
        } else {
            un[0] = 2.0 * un[1] - un[2];
            un[sol.u.size() - 1] = 2.0 * un[sol.u.size() - 2] - un[sol.u.size() - 3];
        }
        sol.u.swap(un);
    }
    return sol;
}

FkComparison cross_validate(const FkProblem& problem, double y0, int P, std::size_t n_steps,
                            std::uint64_t seed, int threads) {
    FkComparison cmp;
    const PdeSolution fine = solve_pde(problem);
    FkProblem coarse_problem = problem;
    coarse_problem.n_y = (problem.n_y - 1) / 2 + 1;
    coarse_problem.n_t = 0;
    const PdeSolution coarse = solve_pde(coarse_problem);
    cmp.pde_value = fine.value_at(y0);
    // second-order scheme: halving dy multiplies the error by ~4
    cmp.pde_err_est = std::fabs(fine.value_at(y0) - coarse.value_at(y0)) / 3.0;

    IntegrateOptions opts;  // Euler-Maruyama
    const auto res = mc::estimate_expectation(
        problem.model, opts, Vec{y0}, 0.0, problem.t, n_steps, P, seed,
        [&](const Vec& y) { return problem.f(y[0]); }, threads);
    cmp.mc_mean = res.mean;
    cmp.mc_se = res.se;

    // EM weak bias is O(h); fold a first-order Richardson proxy into the band
    const double h = problem.t / static_cast<double>(n_steps);
    const double bias_allowance = std::fabs(cmp.pde_value) * h + cmp.pde_err_est;
    cmp.pass = std::fabs(cmp.pde_value - cmp.mc_mean) < 4.0 * (cmp.mc_se + bias_allowance);
    return cmp;
}

}  // namespace fk
}  // namespace sdesim
