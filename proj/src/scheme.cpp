#include "sdesim/scheme.hpp"

#include <cmath>

namespace sdesim {

SchemeKind scheme_from_string(const std::string& s) {
    if (s == "em" || s == "euler_maruyama") return SchemeKind::euler_maruyama;
    if (s == "milstein") return SchemeKind::milstein;
    if (s == "cg_half" || s == "castell_gaines_half") return SchemeKind::castell_gaines_half;
    if (s == "cg_one" || s == "castell_gaines_one") return SchemeKind::castell_gaines_one;
    if (s == "heston_ft" || s == "heston_full_truncation")
        return SchemeKind::heston_full_truncation;
    throw std::invalid_argument("unknown scheme: " + s);
}

std::string scheme_to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::euler_maruyama: return "em";
        case SchemeKind::milstein: return "milstein";
        case SchemeKind::castell_gaines_half: return "cg_half";
        case SchemeKind::castell_gaines_one: return "cg_one";
        case SchemeKind::heston_full_truncation: return "heston_ft";
    }
    return "?";
}

AreaSampler area_sampler_from_string(const std::string& s) {
    if (s == "none") return AreaSampler::none;
    if (s == "kl") return AreaSampler::kl;
    if (s == "rw") return AreaSampler::rw;
    if (s == "cond") return AreaSampler::cond;
    throw std::invalid_argument("unknown area sampler: " + s);
}

bool scheme_needs_areas(SchemeKind k, int d) {
    return d >= 2 && (k == SchemeKind::milstein || k == SchemeKind::castell_gaines_one);
}

Vec em_step(const SdeModel& m, const Vec& y, double h, const std::vector<double>& dW) {
    Vec out(y), tmp(y.size());
    m.drift_ito(y, tmp);
    for (std::size_t k = 0; k < y.size(); ++k) out[k] += h * tmp[k];
    for (int i = 0; i < m.d; ++i) {
        m.diffusion[static_cast<std::size_t>(i)](y, tmp);
        for (std::size_t k = 0; k < y.size(); ++k) out[k] += dW[static_cast<std::size_t>(i)] * tmp[k];
    }
    return out;
}

static void directional(const SdeModel& m, int i, const Vec& y, const Vec& v, Vec& out) {
    const auto ui = static_cast<std::size_t>(i);
    if (ui < m.ddiffusion.size() && m.ddiffusion[ui]) m.ddiffusion[ui](y, v, out);
    else algebra::directional_derivative_fd(m.diffusion[ui], y, v, out);
}

Vec milstein_step(const SdeModel& m, const Vec& y, double h, const std::vector<double>& dW,
                  const std::vector<double>& areas) {
    if (m.d >= 2 && areas.empty())
        throw std::invalid_argument(
            "milstein_step: d >= 2 requires Levy areas; configure an area sampler (kl|rw|cond)");
    Vec out(y), tmp(y.size()), vi(y.size()), vij(y.size());
    m.strat_drift(y, tmp);
    for (std::size_t k = 0; k < y.size(); ++k) out[k] += h * tmp[k];
    for (int i = 0; i < m.d; ++i) {
        m.diffusion[static_cast<std::size_t>(i)](y, tmp);
        for (std::size_t k = 0; k < y.size(); ++k) out[k] += dW[static_cast<std::size_t>(i)] * tmp[k];
    }
    // second-order terms: J_ij V_ij with V_ij = dV_j(y)[V_i(y)]
    for (int i = 0; i < m.d; ++i) {
        m.diffusion[static_cast<std::size_t>(i)](y, vi);
        for (int j = 0; j < m.d; ++j) {
            double jij;
            if (i == j) {
                jij = levy::j_diag(dW[static_cast<std::size_t>(i)]);
            } else {
                const int hi = std::max(i, j), lo = std::min(i, j);
                const double a = areas[area_index(hi, lo)];
                const auto [jhl, jlh] =
                    levy::j_pair_from_area(dW[static_cast<std::size_t>(hi)],
                                           dW[static_cast<std::size_t>(lo)], a);
                jij = (i == hi) ? jhl : jlh;
            }
            directional(m, j, y, vi, vij);
            for (std::size_t k = 0; k < y.size(); ++k) out[k] += jij * vij[k];
        }
    }
    return out;
}

Vec castell_gaines_step(const SdeModel& m, const Vec& y, double h, const std::vector<double>& dW,
                        const std::vector<double>& areas, bool with_areas, int ode_substeps) {
    if (ode_substeps < 1) throw std::invalid_argument("castell_gaines_step: ode_substeps >= 1");
    Vec vi(y.size()), vj(y.size()), dv(y.size()), tmp(y.size());
    // frozen vector field psi_hat
    auto psi = [&](const Vec& u, Vec& out) {
        out.assign(u.size(), 0.0);
        m.strat_drift(u, tmp);
        for (std::size_t k = 0; k < u.size(); ++k) out[k] += h * tmp[k];
        for (int i = 0; i < m.d; ++i) {
            m.diffusion[static_cast<std::size_t>(i)](u, tmp);
            for (std::size_t k = 0; k < u.size(); ++k)
                out[k] += dW[static_cast<std::size_t>(i)] * tmp[k];
        }
        if (with_areas) {
            for (int i = 1; i < m.d; ++i) {
                m.diffusion[static_cast<std::size_t>(i)](u, vi);
                for (int j = 0; j < i; ++j) {
                    const double a = areas[area_index(i, j)];
                    if (a == 0.0) continue;
                    m.diffusion[static_cast<std::size_t>(j)](u, vj);
                    directional(m, j, u, vi, dv);  // (V_i . d) V_j
                    for (std::size_t k = 0; k < u.size(); ++k) out[k] += a * dv[k];
                    directional(m, i, u, vj, dv);  // (V_j . d) V_i
                    for (std::size_t k = 0; k < u.size(); ++k) out[k] -= a * dv[k];
                }
            }
        }
    };
    // classical RK4 on tau in [0,1]
    Vec u(y), k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), stage(y.size());
    const double dtau = 1.0 / static_cast<double>(ode_substeps);
    for (int s = 0; s < ode_substeps; ++s) {
        psi(u, k1);
        for (std::size_t k = 0; k < u.size(); ++k) stage[k] = u[k] + 0.5 * dtau * k1[k];
        psi(stage, k2);
        for (std::size_t k = 0; k < u.size(); ++k) stage[k] = u[k] + 0.5 * dtau * k2[k];
        psi(stage, k3);
        for (std::size_t k = 0; k < u.size(); ++k) stage[k] = u[k] + dtau * k3[k];
        psi(stage, k4);
        for (std::size_t k = 0; k < u.size(); ++k)
            u[k] += dtau / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    return u;
}

std::pair<double, double> heston_ft_step(const HestonParams& p, double S, double v, double h,
                                         double J1, double J2) {
    const double vplus = std::max(0.0, v);
    const double sv = std::sqrt(vplus);
    const double Snew = std::exp((p.mu - vplus / 2.0) * h + sv * J1) * S;
    const double vnew = v + p.kappa * (p.theta - vplus) * h +
                        p.epsilon * (p.rho * J1 + std::sqrt(1.0 - p.rho * p.rho) * J2) * sv;
    return {Snew, vnew};
}

Vec integrate_path(const SdeModel& m, const IntegrateOptions& opts, const CoarseView& view,
                   const Vec& y0, RngStream* area_rng, std::vector<Vec>* trajectory) {
    if (opts.scheme == SchemeKind::heston_full_truncation && !m.heston)
        throw std::invalid_argument("heston_full_truncation requires the heston model");

    const std::size_t n = view.steps();
    const double h = view.dt();
    const bool needs_areas = scheme_needs_areas(opts.scheme, m.d);
    if (needs_areas && opts.area.sampler == AreaSampler::none)
        throw std::invalid_argument(scheme_to_string(opts.scheme) +
                                    " with d >= 2 requires an area sampler (kl|rw|cond)");
    if (needs_areas &&
        (opts.area.sampler == AreaSampler::kl || opts.area.sampler == AreaSampler::rw) &&
        area_rng == nullptr)
        throw std::invalid_argument("kl/rw area sampler requires an auxiliary rng stream");

    Vec y(y0);
    if (trajectory) {
        trajectory->clear();
        trajectory->push_back(y);
    }
    std::vector<double> dW(static_cast<std::size_t>(m.d));
    std::vector<double> areas;
    if (needs_areas) areas.assign(area_index(m.d - 1, m.d - 2) + 1, 0.0);

    for (std::size_t step = 0; step < n; ++step) {
        for (int i = 0; i < m.d; ++i) dW[static_cast<std::size_t>(i)] = view.increment(i, step);

        if (needs_areas) {
            if (opts.area.sampler == AreaSampler::cond) {
                for (int i = 1; i < m.d; ++i)
                    for (int j = 0; j < i; ++j) {
                        const double jij = levy::j12_hat_from_increments(
                            view.fine_block(i, step), view.fine_block(j, step), view.factor);
                        areas[area_index(i, j)] = jij - 0.5 * dW[static_cast<std::size_t>(i)] *
                                                            dW[static_cast<std::size_t>(j)];
                    }
            } else {
                // kl/rw sample at the finest bundle scale and compose up to
                // the coarse step via
                //   J12(0,2h) = J12(0,h) + J12(h,2h) + (W1(h) - W1(0)) dW2(h,2h),
                // so every dyadic level of the same bundle sees the same
                // underlying area realization (matched-path consistency).
                const double hf = view.parent->dt_fine;
                const int q = opts.area.q > 0 ? opts.area.q
                              : (opts.area.sampler == AreaSampler::kl) ? levy::auto_q_kl(hf)
                                                                       : levy::auto_q_rw(hf);
                std::vector<double> jblock(areas.size(), 0.0);
                std::vector<double> w(static_cast<std::size_t>(m.d), 0.0);
                for (std::size_t f = 0; f < view.factor; ++f) {
                    for (int i = 1; i < m.d; ++i) {
                        const double di = view.fine_block(i, step)[f];
                        for (int j = 0; j < i; ++j) {
                            const double dj = view.fine_block(j, step)[f];
                            levy::LevyContext ctx{hf, di, dj};
                            const double a = (opts.area.sampler == AreaSampler::kl)
                                                 ? levy::sample_kl(*area_rng, ctx, q)
                                                 : levy::sample_rw(*area_rng, ctx, q);
                            jblock[area_index(i, j)] +=
                                w[static_cast<std::size_t>(i)] * dj + 0.5 * di * dj + a;
                        }
                    }
                    for (int i = 0; i < m.d; ++i)
                        w[static_cast<std::size_t>(i)] += view.fine_block(i, step)[f];
                }
                for (int i = 1; i < m.d; ++i)
                    for (int j = 0; j < i; ++j) {
                        const std::size_t idx = area_index(i, j);
                        areas[idx] = jblock[idx] - 0.5 * dW[static_cast<std::size_t>(i)] *
                                                       dW[static_cast<std::size_t>(j)];
                    }
            }
        }

        switch (opts.scheme) {
            case SchemeKind::euler_maruyama:
                y = em_step(m, y, h, dW);
                break;
            case SchemeKind::milstein:
                y = milstein_step(m, y, h, dW, areas);
                break;
            case SchemeKind::castell_gaines_half:
                y = castell_gaines_step(m, y, h, dW, areas, false, opts.ode_substeps);
                break;
            case SchemeKind::castell_gaines_one:
                y = castell_gaines_step(m, y, h, dW, areas, true, opts.ode_substeps);
                break;
            case SchemeKind::heston_full_truncation: {
                auto [S, v] = heston_ft_step(*m.heston, y[0], y[1], h, dW[0], dW[1]);
                y[0] = S;
                y[1] = v;
                break;
            }
        }

        for (double yk : y)
            if (!std::isfinite(yk)) throw NonFiniteError(step);
        if (trajectory) trajectory->push_back(y);
    }
    return y;
}

}  // namespace sdesim
