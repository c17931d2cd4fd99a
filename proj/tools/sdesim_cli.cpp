// Command-line front end: simulate | converge | weak-strong | levy-test |
// fk-check | selftest. CSV outputs use full round-trip precision so that a
// rerun with the same manifest is byte-identical (timing columns exempt).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdesim/fk.hpp"
#include "sdesim/levy.hpp"
#include "sdesim/mc.hpp"

using nlohmann::json;
using namespace sdesim;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 42;
    int threads = 0;
    std::string out;
    std::string format = "csv";
};

std::vector<std::pair<std::string, double>> parse_params(const std::vector<std::string>& kvs) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& kv : kvs) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos)
            throw CLI::ValidationError("--param", "expected key=value, got " + kv);
        out.emplace_back(kv.substr(0, pos), std::stod(kv.substr(pos + 1)));
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << text;
}

void write_manifest(const std::string& out, const json& j) {
    if (out.empty()) return;
    std::ofstream f(out + ".manifest.json");
    f << j.dump(2) << "\n";
}

int run_selftest() {
    int fails = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::printf("%s %s\n", ok ? "[PASS]" : "[FAIL]", name.c_str());
        if (!ok) ++fails;
    };

    // word expectation vs Stratonovich->Ito route, all words length <= 4, d=2
    {
        bool ok = true;
        std::vector<algebra::Word> words;
        for (int len = 1; len <= 4; ++len) {
            std::vector<algebra::Word> level{{}};
            for (int i = 0; i < len; ++i) {
                std::vector<algebra::Word> next;
                for (auto& w : level)
                    for (int a = 0; a <= 2; ++a) {
                        auto w2 = w;
                        w2.push_back(a);
                        next.push_back(w2);
                    }
                level.swap(next);
            }
            words.insert(words.end(), level.begin(), level.end());
        }
        for (const auto& w : words) {
            const auto lhs = algebra::expected_stratonovich_exact(w);
            algebra::Rational acc(0);
            int power = -1;
            for (const auto& [c, iw] : algebra::strat_to_ito(w)) {
                const auto e = algebra::expected_ito_exact(iw);
                if (e.coeff.num == 0) continue;
                if (power >= 0 && power != e.power) { acc = algebra::Rational(-1); break; }
                power = e.power;
                acc = acc + c * e.coeff;
            }
            const bool zero = lhs.coeff.num == 0 && acc.num == 0;
            if (!zero && !(lhs.coeff == acc && lhs.power == power)) ok = false;
        }
        check(ok, "word identities: E J_w == strat_to_ito o E I_w for |w| <= 4");
    }
    {
        bool ok = true;
        for (int d = 1; d <= 3 && ok; ++d)
            for (int k = 0; k <= 3 && ok; ++k)
                ok = algebra::semigroup_coefficient_check(d, k).ok;
        check(ok, "semigroup combinatorial identity, d <= 3, k <= 3");
    }
    {
        // drift conversion round trip on GBM at random states
        const SdeModel gbm = make_gbm(3.0, 1.4);
        RngStream s(7, 0);
        bool ok = true;
        for (int i = 0; i < 20; ++i) {
            const Vec y{0.5 + s.uniform01()};
            const Vec v0 =
                algebra::ito_drift_to_strat(gbm.drift_ito, gbm.diffusion, gbm.ddiffusion, y);
            const Vec back =
                algebra::strat_drift_to_ito([&](const Vec& yy, Vec& o) { o = v0; },
                                            gbm.diffusion, gbm.ddiffusion, y);
            Vec want(1);
            gbm.drift_ito(y, want);
            if (std::fabs(v0[0] - (3.0 - 0.5 * 1.4 * 1.4) * y[0]) > 1e-12) ok = false;
            if (std::fabs(back[0] - want[0]) > 1e-12) ok = false;
        }
        check(ok, "Ito<->Stratonovich drift conversion round trip (GBM)");
    }
    return fails == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strong/weak SDE simulation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    GlobalOpts g;
    app.add_option("--seed", g.seed, "base seed");
    app.add_option("--threads", g.threads, "worker count (0 = hardware default)");
    app.add_option("--out", g.out, "output file prefix (default: stdout)");
    app.add_option("--format", g.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    // shared model/scheme options
    std::string model_name = "gbm";
    std::vector<std::string> param_kvs;
    std::string scheme_name = "em";
    std::string sampler_name = "none";
    int area_q = 0;
    int ode_substeps = 2;
    std::vector<double> y0;
    double t0 = 0.0, T = 1.0;

    auto add_model_opts = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_name, "langevin|gbm|heston|linear2d");
        cmd->add_option("--param", param_kvs, "model parameter key=value (repeatable)");
        cmd->add_option("--y0", y0, "initial state components");
        cmd->add_option("--t0", t0, "start time");
        cmd->add_option("--T", T, "end time");
    };
    auto add_scheme_opts = [&](CLI::App* cmd) {
        cmd->add_option("--scheme", scheme_name, "em|milstein|cg_half|cg_one|heston_ft");
        cmd->add_option("--area-sampler", sampler_name, "none|kl|rw|cond");
        cmd->add_option("--area-q", area_q, "area sampler budget (0 = auto)");
        cmd->add_option("--ode-substeps", ode_substeps, "Castell-Gaines ODE sub-steps");
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "integrate sample paths, dump trajectories");
    int sim_paths = 1;
    std::size_t sim_steps = 0;
    add_model_opts(sim);
    add_scheme_opts(sim);
    sim->add_option("--paths", sim_paths, "number of paths");
    sim->add_option("--steps", sim_steps, "grid steps (0 = 2^8)");

    // converge
    auto* conv = app.add_subcommand("converge", "matched-path strong-error study");
    int conv_paths = 100, conv_M = 9, conv_Mstart = 4;
    add_model_opts(conv);
    add_scheme_opts(conv);
    conv->add_option("--paths", conv_paths, "number of paths");
    conv->add_option("--M", conv_M, "finest dyadic exponent");
    conv->add_option("--Mstart", conv_Mstart, "coarsest dyadic exponent");

    // weak-strong
    auto* ws = app.add_subcommand("weak-strong", "binomial vs gaussian EM means for GBM");
    double ws_a = 3.0, ws_b = 1.4, ws_y0 = 1.0, ws_T = 1.0, ws_h = 0.05;
    int ws_paths = 10;
    ws->set_help_flag("--help", "print help");  // frees -h; --h is a step size here
    ws->add_option("--a", ws_a);
    ws->add_option("--b", ws_b);
    ws->add_option("--y0", ws_y0);
    ws->add_option("--T", ws_T);
    ws->add_option("--h", ws_h);
    ws->add_option("--paths", ws_paths);

    // levy-test
    auto* lt = app.add_subcommand("levy-test", "sample a Levy-area sampler, compare to oracle");
    std::string lt_sampler = "kl";
    double lt_h = 0.1, lt_dw1 = 0.0, lt_dw2 = 0.0;
    int lt_q = 0;
    std::size_t lt_samples = 10000;
    bool lt_dump = false;
    lt->set_help_flag("--help", "print help");
    lt->add_option("--sampler", lt_sampler, "kl|rw|cond");
    lt->add_option("--h", lt_h);
    lt->add_option("--q", lt_q, "budget (0 = auto)");
    lt->add_option("--samples", lt_samples);
    lt->add_option("--dw1", lt_dw1);
    lt->add_option("--dw2", lt_dw2);
    lt->add_flag("--dump", lt_dump, "emit the raw samples as CSV before the summary");

    // fk-check
    auto* fkc = app.add_subcommand("fk-check", "PDE vs Monte-Carlo cross-validation");
    std::string fk_f = "id";
    double fk_t = 1.0, fk_y0 = 1.0;
    int fk_grid = 401, fk_paths = 20000;
    std::size_t fk_steps = 256;
    add_model_opts(fkc);
    fkc->add_option("--f", fk_f, "id|square|exp");
    fkc->add_option("--t", fk_t, "horizon");
    fkc->add_option("--y0-query", fk_y0, "evaluation point");
    fkc->add_option("--grid", fk_grid, "spatial grid points");
    fkc->add_option("--paths", fk_paths);
    fkc->add_option("--steps", fk_steps, "MC time steps");

    auto* st = app.add_subcommand("selftest", "run the word-identity and consistency suites");
    (void)st;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (st->parsed()) return run_selftest();

        const auto params = parse_params(param_kvs);
        IntegrateOptions opts;
        opts.scheme = scheme_from_string(scheme_name);
        opts.area.sampler = area_sampler_from_string(sampler_name);
        opts.area.q = area_q;
        opts.ode_substeps = ode_substeps;

        if (sim->parsed()) {
            if (sim_paths < 1) throw std::invalid_argument("--paths must be >= 1");
            SdeModel model = make_model_by_name(model_name, params);
            if (model_name == "heston" && scheme_name == "em")
                opts.scheme = SchemeKind::heston_full_truncation;
            if (y0.empty()) y0 = (model.N == 2) ? Vec{1.0, 0.09} : Vec{1.0};
            if (sim_steps == 0) sim_steps = 256;
            json manifest{{"command", "simulate"}, {"model", model_name},
                          {"scheme", scheme_to_string(opts.scheme)}, {"seed", g.seed},
                          {"paths", sim_paths}, {"steps", sim_steps}, {"t0", t0}, {"T", T},
                          {"y0", y0}};
            for (int p = 0; p < sim_paths; ++p) {
                RngStream stream(g.seed, static_cast<std::uint64_t>(p));
                const PathBundle bundle =
                    generate_bundle(stream, model.d, t0, T, sim_steps, IncrementKind::gaussian);
                RngStream aux = stream.substream(0x4C455659u);
                std::vector<Vec> traj;
                integrate_path(model, opts, coarsen(bundle, 1), y0, &aux, &traj);
                std::string text = (model_name == "heston") ? "t,S,v\n" : "t";
                if (model_name != "heston") {
                    for (int k = 0; k < model.N; ++k) text += ",y" + std::to_string(k + 1);
                    text += "\n";
                }
                char buf[256];
                const double dt = (T - t0) / static_cast<double>(sim_steps);
                for (std::size_t n = 0; n < traj.size(); ++n) {
                    std::snprintf(buf, sizeof buf, "%.17g", t0 + dt * static_cast<double>(n));
                    text += buf;
                    for (double c : traj[n]) {
                        std::snprintf(buf, sizeof buf, ",%.17g", c);
                        text += buf;
                    }
                    text += "\n";
                }
                const std::string path =
                    g.out.empty() ? "" : g.out + "_p" + std::to_string(p) + ".csv";
                write_text(path, text);
            }
            write_manifest(g.out, manifest);
            return 0;
        }

        if (conv->parsed()) {
            SdeModel model = make_model_by_name(model_name, params);
            if (model_name == "heston") {
                opts.scheme = SchemeKind::heston_full_truncation;
                if (y0.empty()) y0 = Vec{1.0, 0.09};
            }
            if (y0.empty()) y0 = (model.N == 2) ? Vec{1.0, 1.0} : Vec{1.0};
            mc::EnsembleConfig cfg;
            cfg.P = conv_paths;
            cfg.seed = g.seed;
            cfg.t0 = t0;
            cfg.T = T;
            cfg.M = conv_M;
            cfg.Mstart = conv_Mstart;
            cfg.opts = opts;
            cfg.y0 = y0;
            cfg.threads = g.threads;
            const auto rep = mc::strong_error_study(model, cfg);
            write_text(g.out.empty() ? "" : g.out + ".csv", mc::error_report_csv(rep));
            write_manifest(g.out, json{{"command", "converge"}, {"model", model_name},
                                       {"scheme", scheme_to_string(opts.scheme)},
                                       {"seed", g.seed}, {"paths", conv_paths}, {"M", conv_M},
                                       {"Mstart", conv_Mstart}, {"t0", t0}, {"T", T},
                                       {"y0", y0}, {"area_sampler", sampler_name},
                                       {"area_q", area_q}});
            return 0;
        }

        if (ws->parsed()) {
            const auto rows =
                mc::weak_vs_strong_study(ws_a, ws_b, ws_y0, ws_T, ws_h, ws_paths, g.seed, g.threads);
            write_text(g.out.empty() ? "" : g.out + ".csv", mc::weak_strong_csv(rows));
            write_manifest(g.out, json{{"command", "weak-strong"}, {"a", ws_a}, {"b", ws_b},
                                       {"y0", ws_y0}, {"T", ws_T}, {"h", ws_h},
                                       {"paths", ws_paths}, {"seed", g.seed}});
            return 0;
        }

        if (lt->parsed()) {
            RngStream stream(g.seed, 0);
            std::vector<double> samples;
            samples.reserve(lt_samples);
            levy::LevyContext ctx{lt_h, lt_dw1, lt_dw2};
            if (lt_sampler == "kl") {
                const int q = lt_q > 0 ? lt_q : levy::auto_q_kl(lt_h);
                for (std::size_t i = 0; i < lt_samples; ++i)
                    samples.push_back(levy::sample_kl(stream, ctx, q));
            } else if (lt_sampler == "rw") {
                const int q = lt_q > 0 ? lt_q : levy::auto_q_rw(lt_h);
                for (std::size_t i = 0; i < lt_samples; ++i)
                    samples.push_back(levy::sample_rw(stream, ctx, q));
            } else if (lt_sampler == "cond") {
                const int q = lt_q > 0 ? lt_q : levy::auto_q_kl(lt_h);
                for (std::size_t i = 0; i < lt_samples; ++i)
                    samples.push_back(levy::sample_conditional(stream, lt_h, q).area());
            } else {
                throw std::invalid_argument("unknown sampler: " + lt_sampler);
            }
            double mean = 0.0;
            for (double s : samples) mean += s;
            mean /= static_cast<double>(samples.size());
            double var = 0.0;
            for (double s : samples) var += (s - mean) * (s - mean);
            var /= static_cast<double>(samples.size() - 1);
            // cond re-draws the conditioning increments, so its law is the
            // unconditional one
            const levy::DensityOracle oracle = (lt_sampler == "cond")
                                                   ? levy::DensityOracle::unconditional(lt_h)
                                                   : levy::DensityOracle(ctx);
            const double ks =
                levy::ks_distance(samples, [&](double x) { return oracle.cdf(x); });
            std::string text;
            if (lt_dump) {
                text += "sample\n";
                char buf[64];
                for (double s : samples) {
                    std::snprintf(buf, sizeof buf, "%.17g\n", s);
                    text += buf;
                }
            }
            char buf[256];
            std::snprintf(buf, sizeof buf, "mean,variance,ks\n%.17g,%.17g,%.17g\n", mean, var, ks);
            text += buf;
            write_text(g.out.empty() ? "" : g.out + ".csv", text);
            return 0;
        }

        if (fkc->parsed()) {
            fk::FkProblem prob;
            prob.model = make_model_by_name(model_name, params);
            if (prob.model.N != 1)
                throw std::invalid_argument("fk-check supports scalar models only");
            if (fk_f == "id") prob.f = [](double y) { return y; };
            else if (fk_f == "square") prob.f = [](double y) { return y * y; };
            else if (fk_f == "exp") prob.f = [](double y) { return std::exp(y); };
            else throw std::invalid_argument("unknown f: " + fk_f);
            prob.t = fk_t;
            prob.n_y = fk_grid;
            prob.y_lo = fk_y0 - 4.0;
            prob.y_hi = fk_y0 + 4.0;
            if (model_name == "gbm") prob.y_lo = std::max(prob.y_lo, 1e-3);
            const auto cmp = fk::cross_validate(prob, fk_y0, fk_paths, fk_steps, g.seed, g.threads);
            std::printf("pde_value,pde_err_est,mc_mean,mc_se\n%.17g,%.17g,%.17g,%.17g\n",
                        cmp.pde_value, cmp.pde_err_est, cmp.mc_mean, cmp.mc_se);
            std::printf("%s |pde - mc| = %.3g vs tolerance\n", cmp.pass ? "PASS" : "FAIL",
                        std::fabs(cmp.pde_value - cmp.mc_mean));
            return cmp.pass ? 0 : 2;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
