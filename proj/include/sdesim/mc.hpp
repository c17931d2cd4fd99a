#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdesim/scheme.hpp"

namespace sdesim {
namespace mc {

// Runs fn(p) for p = 0..P-1. threads <= 1 selects the serial reference
// implementation; results must be bitwise identical either way (each path
// draws from its own stream and writes only its own slots).
void for_each_path_serial(int P, const std::function<void(int)>& fn);
void for_each_path(int P, int threads, const std::function<void(int)>& fn);

struct EnsembleConfig {
    int P = 100;
    std::uint64_t seed = 42;
    double t0 = 0.0;
    double T = 1.0;
    int M = 9;        // finest level: h_min = (T-t0)/2^M
    int Mstart = 4;   // coarsest level: h_max = (T-t0)/2^Mstart
    IntegrateOptions opts;
    Vec y0;
    int threads = 0;  // 0 -> hardware default
};

struct LevelError {
    double h = 0.0;
    double rms = 0.0;
    double se = 0.0;           // standard error of the RMS estimate
    double cpu_seconds = 0.0;  // accumulated across paths
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

struct ErrorReport {
    std::vector<LevelError> levels;  // coarsest first
    FitResult fit;
    std::size_t nonfinite_paths = 0;
    bool reference_is_exact = false;
};

FitResult fit_order(const std::vector<std::pair<double, double>>& levels);

// Matched-path strong-error protocol: one finest bundle per path, dyadic
// coarsenings integrated on the same path, per-path differences taken
// against the reference (exact solution when the model has one, otherwise
// the finest level) before averaging.
ErrorReport strong_error_study(const SdeModel& model, const EnsembleConfig& cfg);

struct MeanResult {
    double mean = 0.0;
    double se = 0.0;
    std::size_t excluded = 0;
};

MeanResult estimate_expectation(const SdeModel& model, const IntegrateOptions& opts, const Vec& y0,
                                double t0, double T, std::size_t n_steps, int P,
                                std::uint64_t seed, const std::function<double(const Vec&)>& f,
                                int threads = 0);

struct WeakStrongRow {
    double t = 0.0;
    double mean_binomial = 0.0;
    double mean_gaussian = 0.0;
    double analytic = 0.0;
};

// Identical EM loop on binomial and gaussian bundles for the scalar linear
// model; per-step ensemble means against y0 exp(a t).
std::vector<WeakStrongRow> weak_vs_strong_study(double a, double b, double y0, double T, double h,
                                                int P, std::uint64_t seed, int threads = 0);

std::string error_report_csv(const ErrorReport& rep, bool include_cpu = true);
std::string weak_strong_csv(const std::vector<WeakStrongRow>& rows);

}  // namespace mc
}  // namespace sdesim
