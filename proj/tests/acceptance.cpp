// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each check pins its tolerance inline.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "sdesim/fk.hpp"
#include "sdesim/levy.hpp"
#include "sdesim/mc.hpp"

using namespace sdesim;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_t0;

void begin() { g_t0 = std::chrono::steady_clock::now(); }

void report(const std::string& name, bool ok, const std::string& detail) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - g_t0).count();
    std::printf("[%s] %s  (%s; %.1fs)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// CDF of an oracle tabulated on a uniform grid; linear interpolation is far
// below the KS resolution at n = 1e5.
struct TabulatedCdf {
    double lo, hi, dx;
    std::vector<double> f;
    TabulatedCdf(const levy::DensityOracle& oracle, double half_width, int n) {
        lo = -half_width;
        hi = half_width;
        dx = (hi - lo) / static_cast<double>(n - 1);
        f.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = oracle.cdf(lo + dx * i);
    }
    double operator()(double x) const {
        if (x <= lo) return 0.0;
        if (x >= hi) return 1.0;
        const double s = (x - lo) / dx;
        const std::size_t i = static_cast<std::size_t>(s);
        const double w = s - static_cast<double>(i);
        return (1.0 - w) * f[i] + w * f[i + 1];
    }
};

mc::EnsembleConfig gbm_config(int P) {
    mc::EnsembleConfig cfg;
    cfg.P = P;
    cfg.seed = 42;
    cfg.M = 9;
    cfg.Mstart = 4;
    cfg.y0 = Vec{1.0};
    return cfg;
}

}  // namespace

int main() {
    const SdeModel gbm = make_gbm(3.0, 1.4);

    // ---- 1: Euler-Maruyama strong order 1/2 on GBM, exact reference --------
    begin();
    mc::ErrorReport em_rep;
    {
        mc::EnsembleConfig cfg = gbm_config(1000);
        em_rep = mc::strong_error_study(gbm, cfg);
        report("1. EM strong order on GBM: slope 0.5 +- 0.1",
               std::fabs(em_rep.fit.slope - 0.5) <= 0.1 && em_rep.reference_is_exact,
               fmt("slope=%.4f, P=1000, h=2^-4..2^-9", em_rep.fit.slope));
    }

    // ---- 2: Milstein strong order 1 on GBM ---------------------------------
    begin();
    {
        mc::EnsembleConfig cfg = gbm_config(1000);
        cfg.opts.scheme = SchemeKind::milstein;
        const auto rep = mc::strong_error_study(gbm, cfg);
        report("2. Milstein strong order on GBM: slope 1.0 +- 0.15",
               std::fabs(rep.fit.slope - 1.0) <= 0.15,
               fmt("slope=%.4f", rep.fit.slope));
    }

    // ---- 3: Castell-Gaines --------------------------------------------------
    // CG-half is tested on the non-commuting bilinear testbed: on GBM the
    // drift and diffusion fields commute, making the truncated-Lie-series flow
    // exact (only the RK4 error remains, observed slope ~2), so GBM cannot
    // exhibit the generic order-1/2 behaviour.
    begin();
    {
        const SdeModel bilinear = make_bilinear();
        const int P = 150, M = 9, Mstart = 4, R = M - Mstart + 1;
        const std::size_t n_fine = std::size_t{1} << M;
        std::vector<double> ms_cg(static_cast<std::size_t>(R), 0.0), ms_em(ms_cg);
        for (int p = 0; p < P; ++p) {
            RngStream stream(42, static_cast<std::uint64_t>(p));
            const PathBundle b =
                generate_bundle(stream, 2, 0.0, 1.0, n_fine, IncrementKind::gaussian);
            // fine-Milstein same-path reference with composed KL areas
            IntegrateOptions ref_opts;
            ref_opts.scheme = SchemeKind::milstein;
            ref_opts.area.sampler = AreaSampler::kl;
            RngStream aux = stream.substream(0x4C455659u);
            const Vec ref = integrate_path(bilinear, ref_opts, coarsen(b, 1), Vec{1.0, 1.0}, &aux);
            IntegrateOptions cg_opts, em_opts;
            cg_opts.scheme = SchemeKind::castell_gaines_half;
            for (int r = 0; r < R; ++r) {
                const std::size_t factor = std::size_t{1} << (M - Mstart - r);
                const Vec ycg =
                    integrate_path(bilinear, cg_opts, coarsen(b, factor), Vec{1.0, 1.0});
                const Vec yem =
                    integrate_path(bilinear, em_opts, coarsen(b, factor), Vec{1.0, 1.0});
                double scg = 0, sem = 0;
                for (std::size_t k = 0; k < ref.size(); ++k) {
                    scg += (ref[k] - ycg[k]) * (ref[k] - ycg[k]);
                    sem += (ref[k] - yem[k]) * (ref[k] - yem[k]);
                }
                ms_cg[static_cast<std::size_t>(r)] += scg;
                ms_em[static_cast<std::size_t>(r)] += sem;
            }
        }
        std::vector<std::pair<double, double>> pts;
        bool dominates = true;
        for (int r = 0; r < R; ++r) {
            const double h = 1.0 / static_cast<double>(std::size_t{1} << (Mstart + r));
            const double rms_cg = std::sqrt(ms_cg[static_cast<std::size_t>(r)] / P);
            const double rms_em = std::sqrt(ms_em[static_cast<std::size_t>(r)] / P);
            if (rms_cg > rms_em) dominates = false;
            pts.emplace_back(h, rms_cg);
        }
        const auto fit = mc::fit_order(pts);
        report("3a. CG order-1/2 on the bilinear testbed: slope 0.5 +- 0.1, RMS <= EM at "
               "every level (fine-Milstein reference)",
               std::fabs(fit.slope - 0.5) <= 0.1 && dominates,
               fmt("slope=%.4f, dominates=%s", fit.slope, dominates ? "yes" : "no"));
    }
    begin();
    {
        mc::EnsembleConfig cfg;
        cfg.P = 200;
        cfg.seed = 42;
        cfg.M = 9;
        cfg.Mstart = 4;
        cfg.y0 = Vec{1.0, 1.0};
        cfg.opts.scheme = SchemeKind::castell_gaines_one;
        cfg.opts.area.sampler = AreaSampler::kl;  // auto Q = ceil(1/h)
        const auto rep = mc::strong_error_study(make_bilinear(), cfg);
        report("3b. CG order-1 with KL areas on the bilinear testbed: slope 1.0 +- 0.2",
               std::fabs(rep.fit.slope - 1.0) <= 0.2,
               fmt("slope=%.4f, finest-level reference", rep.fit.slope));
    }

    // ---- 4: conditional-area strong error law ------------------------------
    // Note: E[J12(0,dt)^2] = dt^2/2 per sub-interval, so the exact RMS is
    // h/sqrt(2Q); the F-times-finer nested reference shaves the h^2/(2QF)
    // remainder off the oracle.
    begin();
    {
        struct Cfg { double h; int Q; };
        const Cfg cfgs[] = {{0.01, 25}, {0.01, 100}, {0.02, 100}};
        const int F = 64, trials = 10000;
        bool all_ok = true;
        std::string detail;
        RngStream s(42, 0);
        for (const auto& c : cfgs) {
            const int qf = c.Q * F;
            const double dt = c.h / qf, sdt = std::sqrt(dt);
            std::vector<double> d1(static_cast<std::size_t>(qf)), d2(d1), c1, c2;
            double ms = 0.0;
            for (int t = 0; t < trials; ++t) {
                for (int q = 0; q < qf; ++q) {
                    d1[static_cast<std::size_t>(q)] = sdt * s.normal();
                    d2[static_cast<std::size_t>(q)] = sdt * s.normal();
                }
                const double fine = levy::j12_hat_from_increments(d1.data(), d2.data(),
                                                                  static_cast<std::size_t>(qf));
                c1.assign(static_cast<std::size_t>(c.Q), 0.0);
                c2.assign(static_cast<std::size_t>(c.Q), 0.0);
                for (int q = 0; q < qf; ++q) {
                    c1[static_cast<std::size_t>(q / F)] += d1[static_cast<std::size_t>(q)];
                    c2[static_cast<std::size_t>(q / F)] += d2[static_cast<std::size_t>(q)];
                }
                const double coarse = levy::j12_hat_from_increments(c1.data(), c2.data(),
                                                                    static_cast<std::size_t>(c.Q));
                ms += (fine - coarse) * (fine - coarse);
            }
            const double rms = std::sqrt(ms / trials);
            const double oracle = std::sqrt(0.5 * c.h * c.h / c.Q - 0.5 * c.h * c.h / qf);
            const bool ok = std::fabs(rms - oracle) / oracle <= 0.10;
            all_ok = all_ok && ok;
            detail += fmt("(h=%g,Q=%d): rms=%.3e vs h/sqrt(2Q)=%.3e; ", c.h, c.Q, rms,
                          c.h / std::sqrt(2.0 * c.Q));
        }
        report("4. conditional-area RMS error = h/sqrt(2Q) +- 10% (the h/sqrt(Q) in the "
               "source derivation drops a factor 2)",
               all_ok, detail);
    }

    // ---- 5: Levy samplers vs the density oracle ----------------------------
    begin();
    {
        const double h = 0.1;
        levy::LevyContext ctx{h, std::sqrt(h), std::sqrt(h)};
        const levy::DensityOracle oracle(ctx);
        const double sd = std::sqrt((1.0 + ctx.a2()) * h * h / 12.0);
        const TabulatedCdf cdf(oracle, 14.0 * sd, 4001);
        const std::size_t n = 100000;

        RngStream s1(42, 0);
        std::vector<double> x;
        x.reserve(n);
        for (std::size_t i = 0; i < n; ++i) x.push_back(levy::sample_kl(s1, ctx, 200));
        const double ks_kl = levy::ks_distance(x, [&](double v) { return cdf(v); });

        RngStream s2(42, 1);
        x.clear();
        for (std::size_t i = 0; i < n; ++i) x.push_back(levy::sample_rw(s2, ctx, 32));
        const double ks_rw = levy::ks_distance(x, [&](double v) { return cdf(v); });

        report("5. KS distance vs inverse-Fourier oracle < 0.01 at n=1e5 (KL Q=200, RW Q=32)",
               ks_kl < 0.01 && ks_rw < 0.01, fmt("KS(kl)=%.4f, KS(rw)=%.4f", ks_kl, ks_rw));
    }

    // ---- 6: word identities, exact and Monte Carlo -------------------------
    begin();
    {
        bool exact_ok = true;
        std::vector<algebra::Word> words;
        {
            std::vector<algebra::Word> level{{}};
            for (int len = 1; len <= 4; ++len) {
                std::vector<algebra::Word> next;
                for (const auto& w : level)
                    for (int a = 0; a <= 2; ++a) {
                        auto w2 = w;
                        w2.push_back(a);
                        next.push_back(w2);
                    }
                level.swap(next);
                words.insert(words.end(), level.begin(), level.end());
            }
        }
        for (const auto& w : words) {
            const auto lhs = algebra::expected_stratonovich_exact(w);
            algebra::Rational acc(0);
            int power = 0;
            for (const auto& [c, iw] : algebra::strat_to_ito(w)) {
                const auto e = algebra::expected_ito_exact(iw);
                if (e.coeff.num == 0) continue;
                acc = acc + c * e.coeff;
                power = e.power;
            }
            const bool zero_both = lhs.coeff.num == 0 && acc.num == 0;
            if (!zero_both && !(lhs.coeff == acc && lhs.power == power)) exact_ok = false;
        }

        // Monte Carlo iterated integrals over [0,1], 256 sub-steps, 1e5 paths
        const int P = 100000;
        const std::size_t n_sub = 256;
        const double h = 1.0 / static_cast<double>(n_sub);
        double s11 = 0, s11_2 = 0, s12 = 0, s12_2 = 0, s00 = 0;
        for (int p = 0; p < P; ++p) {
            RngStream s(42, static_cast<std::uint64_t>(p));
            const PathBundle b = generate_bundle(s, 2, 0.0, 1.0, n_sub, IncrementKind::gaussian);
            const double wT = pairwise_sum(b.increments[0].data(), n_sub);
            const double j11 = 0.5 * wT * wT;
            const double j12 = levy::j12_hat_from_increments(b.increments[0].data(),
                                                             b.increments[1].data(), n_sub);
            double j00 = 0.0;  // midpoint rule integrates J_0(s)=s exactly
            for (std::size_t q = 0; q < n_sub; ++q)
                j00 += (static_cast<double>(q) + 0.5) * h * h;
            s11 += j11;
            s11_2 += j11 * j11;
            s12 += j12;
            s12_2 += j12 * j12;
            s00 += j00;
        }
        const double m11 = s11 / P, m12 = s12 / P, m00 = s00 / P;
        const double se11 = std::sqrt((s11_2 / P - m11 * m11) / (P - 1));
        const double se12 = std::sqrt((s12_2 / P - m12 * m12) / (P - 1));
        const bool mc_ok = std::fabs(m11 - 0.5) <= 3.0 * se11 &&
                           std::fabs(m12 - 0.0) <= 3.0 * se12 &&
                           std::fabs(m00 - 0.5) <= 1e-12;
        report("6. word identities: exact length<=4 relations + MC means for 11,12,00",
               exact_ok && mc_ok,
               fmt("exact=%s, E J11=%.4f (0.5), E J12=%.2e (0), E J00=%.4f (0.5)",
                   exact_ok ? "ok" : "BAD", m11, m12, m00));
    }

    // ---- 7: E J_ii = h/2 ----------------------------------------------------
    begin();
    {
        const double h = 0.05;
        const long n = 1000000;
        RngStream s(42, 0);
        double m = 0, m2 = 0;
        for (long i = 0; i < n; ++i) {
            const double dw = s.wiener_increment(h);
            const double jii = 0.5 * dw * dw;
            m += jii;
            m2 += jii * jii;
        }
        m /= static_cast<double>(n);
        const double se = std::sqrt((m2 / static_cast<double>(n) - m * m) /
                                    static_cast<double>(n - 1));
        report("7. E[J_ii] = h/2 within 3 SE at 1e6 draws, h=0.05",
               std::fabs(m - h / 2.0) <= 3.0 * se, fmt("mean=%.6f, target=%.6f, se=%.1e", m,
                                                       h / 2.0, se));
    }

    // ---- 8: Feynman-Kac cross-check -----------------------------------------
    begin();
    {
        const double a = 3.0, b = 0.25, t = 1.0;
        const double exact = std::exp(-a * t);
        fk::FkProblem prob;
        prob.model = make_langevin(a, b);
        prob.f = [](double y) { return y; };
        prob.t = t;
        prob.y_lo = -4.0;
        prob.y_hi = 4.0;
        prob.n_y = 401;
        const auto sol = fk::solve_pde(prob);
        const double pde = sol.value_at(1.0);

        const std::size_t n_steps = 256;
        IntegrateOptions opts;  // EM
        const auto mcres = mc::estimate_expectation(prob.model, opts, Vec{1.0}, 0.0, t, n_steps,
                                                    100000, 42,
                                                    [](const Vec& y) { return y[0]; });
        // the EM mean for additive-noise OU is exactly (1 - a h)^N
        const double h = t / static_cast<double>(n_steps);
        double em_mean = 1.0;
        for (std::size_t i = 0; i < n_steps; ++i) em_mean *= (1.0 - a * h);
        const double bias = std::fabs(exact - em_mean);
        const bool ok = std::fabs(pde - exact) <= 5e-4 &&
                        std::fabs(mcres.mean - exact) <= 4.0 * mcres.se + bias &&
                        std::fabs(pde - mcres.mean) <= 4.0 * mcres.se + bias + 5e-4;
        report("8. Feynman-Kac: PDE and MC values both at e^-3 within combined 4 sigma",
               ok, fmt("pde=%.6f, mc=%.6f+-%.1e, exact=%.6f, EM bias=%.1e", pde, mcres.mean,
                       mcres.se, exact, bias));
    }

    // ---- 9: weak vs strong increments ---------------------------------------
    begin();
    {
        const double a = 3.0, b = 1.4, T = 1.0, h = 0.05;
        const int P = 100000;
        const std::size_t N = 20;
        const double exact = std::exp(a * T);
        double em_mean = 1.0;
        for (std::size_t i = 0; i < N; ++i) em_mean *= (1.0 + a * h);
        const double bias = std::fabs(exact - em_mean);

        IntegrateOptions opts;  // EM
        double sb = 0, sb2 = 0, sg = 0, sg2 = 0;
        for (int p = 0; p < P; ++p) {
            RngStream stb = RngStream(42, static_cast<std::uint64_t>(p)).substream(0xB10Bu);
            RngStream stg = RngStream(42, static_cast<std::uint64_t>(p)).substream(0x6A05u);
            const PathBundle bb = generate_bundle(stb, 1, 0.0, T, N, IncrementKind::binomial);
            const PathBundle bg = generate_bundle(stg, 1, 0.0, T, N, IncrementKind::gaussian);
            const double yb = integrate_path(gbm, opts, coarsen(bb, 1), Vec{1.0})[0];
            const double yg = integrate_path(gbm, opts, coarsen(bg, 1), Vec{1.0})[0];
            sb += yb;
            sb2 += yb * yb;
            sg += yg;
            sg2 += yg * yg;
        }
        const double mb = sb / P, mg = sg / P;
        const double seb = std::sqrt((sb2 / P - mb * mb) / (P - 1));
        const double seg = std::sqrt((sg2 / P - mg * mg) / (P - 1));
        const bool ok = std::fabs(mb - exact) <= 4.0 * seb + bias &&
                        std::fabs(mg - exact) <= 4.0 * seg + bias;
        report("9. weak-vs-strong: binomial and gaussian EM means near e^3 within 4 SE + "
               "exact O(h) bias",
               ok, fmt("binomial=%.3f+-%.3f, gaussian=%.3f+-%.3f, e^3=%.4f, EM mean=%.4f", mb,
                       seb, mg, seg, exact, em_mean));
    }

    // ---- 10: Heston full-truncation study -----------------------------------
    begin();
    mc::ErrorReport heston_rep;
    {
        mc::EnsembleConfig cfg;
        cfg.P = 100;
        cfg.seed = 42;
        cfg.M = 8;
        cfg.Mstart = 4;
        cfg.y0 = Vec{1.0, 0.09};
        cfg.opts.scheme = SchemeKind::heston_full_truncation;
        heston_rep = mc::strong_error_study(make_heston(HestonParams{}), cfg);
        bool decreasing = true;
        // the finest level is the reference itself (rms 0); check the rest
        for (std::size_t r = 1; r + 1 < heston_rep.levels.size(); ++r)
            if (!(heston_rep.levels[r].rms < heston_rep.levels[r - 1].rms)) decreasing = false;
        const bool positive = heston_rep.levels[heston_rep.levels.size() - 2].rms > 0.0;
        report("10. Heston full truncation (M=8, Mstart=4, P=100): errors strictly "
               "decreasing, all paths finite",
               decreasing && positive && heston_rep.nonfinite_paths == 0,
               fmt("levels=%zu, coarsest rms=%.3e, nonfinite=%zu", heston_rep.levels.size(),
                   heston_rep.levels[0].rms, heston_rep.nonfinite_paths));
    }

    // ---- 11: determinism across worker counts -------------------------------
    begin();
    {
        mc::EnsembleConfig cfg = gbm_config(200);
        cfg.M = 8;
        cfg.threads = 1;
        const auto a1 = mc::strong_error_study(gbm, cfg);
        cfg.threads = 4;
        const auto a4 = mc::strong_error_study(gbm, cfg);
        const bool gbm_same =
            mc::error_report_csv(a1, false) == mc::error_report_csv(a4, false);

        mc::EnsembleConfig hcfg;
        hcfg.P = 50;
        hcfg.seed = 7;
        hcfg.M = 7;
        hcfg.Mstart = 4;
        hcfg.y0 = Vec{1.0, 0.09};
        hcfg.opts.scheme = SchemeKind::heston_full_truncation;
        const SdeModel heston = make_heston(HestonParams{});
        hcfg.threads = 1;
        const auto h1 = mc::strong_error_study(heston, hcfg);
        hcfg.threads = 4;
        const auto h4 = mc::strong_error_study(heston, hcfg);
        const bool heston_same =
            mc::error_report_csv(h1, false) == mc::error_report_csv(h4, false);

        const auto w1 = mc::weak_vs_strong_study(3.0, 1.4, 1.0, 1.0, 0.05, 2000, 42, 1);
        const auto w4 = mc::weak_vs_strong_study(3.0, 1.4, 1.0, 1.0, 0.05, 2000, 42, 4);
        const bool ws_same = mc::weak_strong_csv(w1) == mc::weak_strong_csv(w4);

        report("11. determinism: 1-thread and 4-thread numeric outputs byte-identical",
               gbm_same && heston_same && ws_same,
               fmt("gbm=%s, heston=%s, weak-strong=%s", gbm_same ? "ok" : "DIFF",
                   heston_same ? "ok" : "DIFF", ws_same ? "ok" : "DIFF"));
    }

    std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "ACCEPTED" : "REJECTED",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
