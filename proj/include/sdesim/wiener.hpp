#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdesim/rng.hpp"

namespace sdesim {

enum class IncrementKind { gaussian, binomial };

// Finest-resolution driving path for d independent noise components on a
// uniform grid over [t0,T]. Stored as increments; W values are derived.
struct PathBundle {
    int d = 0;
    double t0 = 0.0;
    double T = 1.0;
    std::size_t n_fine = 0;
    double dt_fine = 0.0;
    IncrementKind kind = IncrementKind::gaussian;
    std::vector<std::vector<double>> increments;  // [d][n_fine]
};

// Balanced pairwise sum. For power-of-two lengths the reduction tree of a
// block coincides with the subtree of any enclosing block, which makes
// dyadic regrouping bit-exact.
double pairwise_sum(const double* x, std::size_t n);

PathBundle generate_bundle(RngStream& stream, int d, double t0, double T,
                           std::size_t n_fine, IncrementKind kind);

// Read-only coarse regrouping of a bundle by an integer factor.
struct CoarseView {
    const PathBundle* parent = nullptr;
    std::size_t factor = 1;

    std::size_t steps() const { return parent->n_fine / factor; }
    double dt() const { return parent->dt_fine * static_cast<double>(factor); }
    double increment(int comp, std::size_t j) const {
        return pairwise_sum(parent->increments[static_cast<std::size_t>(comp)].data() + j * factor,
                            factor);
    }
    const double* fine_block(int comp, std::size_t j) const {
        return parent->increments[static_cast<std::size_t>(comp)].data() + j * factor;
    }
};

CoarseView coarsen(const PathBundle& bundle, std::size_t factor);

// W values at the view's grid points, starting at 0.
std::vector<double> partial_sums(const CoarseView& view, int comp);

// CSV dump: t, W1..Wd per grid point.
void dump_path_csv(const CoarseView& view, const std::string& path);

}  // namespace sdesim
