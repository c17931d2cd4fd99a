#include "sdesim/mc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdesim {
namespace mc {

void for_each_path_serial(int P, const std::function<void(int)>& fn) {
    for (int p = 0; p < P; ++p) fn(p);
}

void for_each_path(int P, int threads, const std::function<void(int)>& fn) {
#ifdef _OPENMP
    if (threads == 1) {
        for_each_path_serial(P, fn);
        return;
    }
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int p = 0; p < P; ++p) fn(p);
#else
    (void)threads;
    for_each_path_serial(P, fn);
#endif
}

FitResult fit_order(const std::vector<std::pair<double, double>>& levels) {
    if (levels.size() < 2) throw std::invalid_argument("fit_order: need >= 2 levels");
    std::vector<double> lx, ly;
    for (const auto& [h, e] : levels) {
        if (!(e > 0.0)) throw std::invalid_argument("fit_order: all errors must be > 0");
        lx.push_back(std::log10(h));
        ly.push_back(std::log10(e));
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    FitResult fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr std::uint64_t kAreaSalt = 0x4C455659u;  // aux stream domain for area samplers

}  // namespace

ErrorReport strong_error_study(const SdeModel& model, const EnsembleConfig& cfg) {
    const int R = cfg.M - cfg.Mstart + 1;
    if (R < 2) throw std::invalid_argument("strong_error_study: need M - Mstart + 1 >= 2");
    if (cfg.P < 2) throw std::invalid_argument("strong_error_study: need P >= 2");

    const std::size_t n_fine = std::size_t{1} << cfg.M;
    const bool exact_ref = static_cast<bool>(model.exact_solution) && model.N == 1 && model.d == 1;

    std::vector<std::vector<double>> diff(static_cast<std::size_t>(cfg.P),
                                          std::vector<double>(static_cast<std::size_t>(R), 0.0));
    std::vector<std::vector<double>> cpu(static_cast<std::size_t>(cfg.P),
                                         std::vector<double>(static_cast<std::size_t>(R), 0.0));
    std::vector<char> bad(static_cast<std::size_t>(cfg.P), 0);

    for_each_path(cfg.P, cfg.threads, [&](int p) {
        try {
            RngStream stream(cfg.seed, static_cast<std::uint64_t>(p));
            const PathBundle bundle = generate_bundle(stream, model.d, cfg.t0, cfg.T, n_fine,
                                                      IncrementKind::gaussian);
            Vec ref;
            if (exact_ref) {
                const double wT =
                    pairwise_sum(bundle.increments[0].data(), bundle.n_fine);
                ref.assign(1, model.exact_solution(cfg.y0[0], cfg.T - cfg.t0, wT));
            } else {
                RngStream aux = stream.substream(kAreaSalt);
                ref = integrate_path(model, cfg.opts, coarsen(bundle, 1), cfg.y0, &aux);
            }
            for (int r = 0; r < R; ++r) {
                const int m = cfg.Mstart + r;  // level exponent, coarsest first
                const std::size_t factor = std::size_t{1} << (cfg.M - m);
                // same aux salt at every level: the kl/rw samplers draw their
                // areas at the finest scale, so matched levels replay the same
                // area realization
                RngStream aux = stream.substream(kAreaSalt);
                const auto t0 = std::chrono::steady_clock::now();
                const Vec y = integrate_path(model, cfg.opts, coarsen(bundle, factor), cfg.y0, &aux);
                cpu[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)] =
                    elapsed_seconds(t0);
                double ss = 0.0;
                for (std::size_t k = 0; k < y.size(); ++k) {
                    const double dk = ref[k] - y[k];
                    ss += dk * dk;
                }
                diff[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)] = std::sqrt(ss);
            }
        } catch (const NonFiniteError&) {
            bad[static_cast<std::size_t>(p)] = 1;
        }
    });

    ErrorReport rep;
    rep.reference_is_exact = exact_ref;
    for (char b : bad) rep.nonfinite_paths += static_cast<std::size_t>(b);
    if (rep.nonfinite_paths > 0)
        std::fprintf(stderr, "warning: %zu non-finite paths excluded\n", rep.nonfinite_paths);
    if (static_cast<double>(rep.nonfinite_paths) > 0.01 * cfg.P)
        throw std::runtime_error("strong_error_study: more than 1% of paths non-finite");
    const std::size_t valid = static_cast<std::size_t>(cfg.P) - rep.nonfinite_paths;

    for (int r = 0; r < R; ++r) {
        LevelError lev;
        lev.h = (cfg.T - cfg.t0) / static_cast<double>(std::size_t{1} << (cfg.Mstart + r));
        double ms = 0.0;
        for (int p = 0; p < cfg.P; ++p) {
            if (bad[static_cast<std::size_t>(p)]) continue;
            const double dv = diff[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)];
            ms += dv * dv;
            lev.cpu_seconds += cpu[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)];
        }
        ms /= static_cast<double>(valid);
        lev.rms = std::sqrt(ms);
        double var = 0.0;
        for (int p = 0; p < cfg.P; ++p) {
            if (bad[static_cast<std::size_t>(p)]) continue;
            const double dv = diff[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)];
            const double c = dv * dv - ms;
            var += c * c;
        }
        var /= static_cast<double>(valid - 1) * static_cast<double>(valid);
        lev.se = lev.rms > 0.0 ? std::sqrt(var) / (2.0 * lev.rms) : 0.0;
        rep.levels.push_back(lev);
    }

    // finest level is the reference itself when no exact solution exists
    std::vector<std::pair<double, double>> pts;
    const int fit_levels = exact_ref ? R : R - 1;
    for (int r = 0; r < fit_levels; ++r) pts.emplace_back(rep.levels[static_cast<std::size_t>(r)].h,
                                                          rep.levels[static_cast<std::size_t>(r)].rms);
    rep.fit = fit_order(pts);
    return rep;
}

MeanResult estimate_expectation(const SdeModel& model, const IntegrateOptions& opts, const Vec& y0,
                                double t0, double T, std::size_t n_steps, int P,
                                std::uint64_t seed, const std::function<double(const Vec&)>& f,
                                int threads) {
    if (P < 2) throw std::invalid_argument("estimate_expectation: need P >= 2");
    std::vector<double> vals(static_cast<std::size_t>(P), 0.0);
    std::vector<char> bad(static_cast<std::size_t>(P), 0);
    for_each_path(P, threads, [&](int p) {
        try {
            RngStream stream(seed, static_cast<std::uint64_t>(p));
            const PathBundle bundle =
                generate_bundle(stream, model.d, t0, T, n_steps, IncrementKind::gaussian);
            RngStream aux = stream.substream(kAreaSalt);
            const Vec y = integrate_path(model, opts, coarsen(bundle, 1), y0, &aux);
            vals[static_cast<std::size_t>(p)] = f(y);
        } catch (const NonFiniteError&) {
            bad[static_cast<std::size_t>(p)] = 1;
        }
    });
    MeanResult res;
    for (char b : bad) res.excluded += static_cast<std::size_t>(b);
    if (res.excluded > 0)
        std::fprintf(stderr, "warning: %zu non-finite paths excluded\n", res.excluded);
    if (static_cast<double>(res.excluded) > 0.01 * P)
        throw std::runtime_error("estimate_expectation: more than 1% of paths non-finite");
    const std::size_t valid = static_cast<std::size_t>(P) - res.excluded;
    double sum = 0.0;
    for (int p = 0; p < P; ++p)
        if (!bad[static_cast<std::size_t>(p)]) sum += vals[static_cast<std::size_t>(p)];
    res.mean = sum / static_cast<double>(valid);
    double ss = 0.0;
    for (int p = 0; p < P; ++p) {
        if (bad[static_cast<std::size_t>(p)]) continue;
        const double c = vals[static_cast<std::size_t>(p)] - res.mean;
        ss += c * c;
    }
    res.se = std::sqrt(ss / static_cast<double>(valid - 1) / static_cast<double>(valid));
    return res;
}

std::vector<WeakStrongRow> weak_vs_strong_study(double a, double b, double y0, double T, double h,
                                                int P, std::uint64_t seed, int threads) {
    const std::size_t N = static_cast<std::size_t>(std::llround(T / h));
    if (N < 1 || P < 1) throw std::invalid_argument("weak_vs_strong_study: bad N or P");
    const SdeModel model = make_gbm(a, b);

    // per-path trajectories, then a serial fixed-order reduction
    std::vector<std::vector<double>> traj_b(static_cast<std::size_t>(P)),
        traj_g(static_cast<std::size_t>(P));
    const IntegrateOptions opts;  // Euler-Maruyama
    for_each_path(P, threads, [&](int p) {
        RngStream sb = RngStream(seed, static_cast<std::uint64_t>(p)).substream(0xB10Bu);
        RngStream sg = RngStream(seed, static_cast<std::uint64_t>(p)).substream(0x6A05u);
        const PathBundle bb = generate_bundle(sb, 1, 0.0, T, N, IncrementKind::binomial);
        const PathBundle bg = generate_bundle(sg, 1, 0.0, T, N, IncrementKind::gaussian);
        std::vector<Vec> tb, tg;
        integrate_path(model, opts, coarsen(bb, 1), Vec{y0}, nullptr, &tb);
        integrate_path(model, opts, coarsen(bg, 1), Vec{y0}, nullptr, &tg);
        auto& ob = traj_b[static_cast<std::size_t>(p)];
        auto& og = traj_g[static_cast<std::size_t>(p)];
        ob.resize(N + 1);
        og.resize(N + 1);
        for (std::size_t n = 0; n <= N; ++n) {
            ob[n] = tb[n][0];
            og[n] = tg[n][0];
        }
    });

    std::vector<WeakStrongRow> rows(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        WeakStrongRow row;
        row.t = h * static_cast<double>(n);
        for (int p = 0; p < P; ++p) {
            row.mean_binomial += traj_b[static_cast<std::size_t>(p)][n];
            row.mean_gaussian += traj_g[static_cast<std::size_t>(p)][n];
        }
        row.mean_binomial /= static_cast<double>(P);
        row.mean_gaussian /= static_cast<double>(P);
        row.analytic = y0 * std::exp(a * row.t);
        rows[n] = row;
    }
    return rows;
}

std::string error_report_csv(const ErrorReport& rep, bool include_cpu) {
    std::string out = include_cpu ? "level,h,rms_error,stderr,cpu_seconds\n"
                                  : "level,h,rms_error,stderr\n";
    char buf[256];
    for (std::size_t r = 0; r < rep.levels.size(); ++r) {
        const auto& lev = rep.levels[r];
        if (include_cpu)
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", r, lev.h, lev.rms,
                          lev.se, lev.cpu_seconds);
        else
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r, lev.h, lev.rms, lev.se);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "slope,%.17g,intercept,%.17g,residual,%.17g\n", rep.fit.slope,
                  rep.fit.intercept, rep.fit.residual);
    out += buf;
    return out;
}

std::string weak_strong_csv(const std::vector<WeakStrongRow>& rows) {
    std::string out = "t,mean_binomial,mean_gaussian,analytic\n";
    char buf[256];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", row.t, row.mean_binomial,
                      row.mean_gaussian, row.analytic);
        out += buf;
    }
    return out;
}

}  // namespace mc
}  // namespace sdesim
