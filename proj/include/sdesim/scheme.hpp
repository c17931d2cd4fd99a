#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sdesim/levy.hpp"
#include "sdesim/model.hpp"
#include "sdesim/wiener.hpp"

namespace sdesim {

enum class SchemeKind {
    euler_maruyama,
    milstein,
    castell_gaines_half,
    castell_gaines_one,
    heston_full_truncation,
};

SchemeKind scheme_from_string(const std::string& s);
std::string scheme_to_string(SchemeKind k);

enum class AreaSampler { none, kl, rw, cond };
AreaSampler area_sampler_from_string(const std::string& s);

struct AreaConfig {
    AreaSampler sampler = AreaSampler::none;
    int q = 0;  // 0 -> auto policy keyed to h
};

struct IntegrateOptions {
    SchemeKind scheme = SchemeKind::euler_maruyama;
    AreaConfig area;
    int ode_substeps = 2;
};

struct NonFiniteError : std::runtime_error {
    explicit NonFiniteError(std::size_t step_index)
        : std::runtime_error("non-finite state at step " + std::to_string(step_index)),
          step(step_index) {}
    std::size_t step;
};

// antisymmetric areas packed by pair (i,j), i>j: index i*(i-1)/2 + j
inline std::size_t area_index(int i, int j) {
    return static_cast<std::size_t>(i) * (static_cast<std::size_t>(i) - 1) / 2 +
           static_cast<std::size_t>(j);
}

Vec em_step(const SdeModel& m, const Vec& y, double h, const std::vector<double>& dW);

Vec milstein_step(const SdeModel& m, const Vec& y, double h, const std::vector<double>& dW,
                  const std::vector<double>& areas);

Vec castell_gaines_step(const SdeModel& m, const Vec& y, double h, const std::vector<double>& dW,
                        const std::vector<double>& areas, bool with_areas, int ode_substeps);

std::pair<double, double> heston_ft_step(const HestonParams& p, double S, double v, double h,
                                         double J1, double J2);

bool scheme_needs_areas(SchemeKind k, int d);

Vec integrate_path(const SdeModel& m, const IntegrateOptions& opts, const CoarseView& view,
                   const Vec& y0, RngStream* area_rng = nullptr,
                   std::vector<Vec>* trajectory = nullptr);

}  // namespace sdesim
