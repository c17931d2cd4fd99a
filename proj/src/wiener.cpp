#include "sdesim/wiener.hpp"

#include <cstdio>
#include <stdexcept>

namespace sdesim {

double pairwise_sum(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return x[0];
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

PathBundle generate_bundle(RngStream& stream, int d, double t0, double T,
                           std::size_t n_fine, IncrementKind kind) {
    if (!(T > t0)) throw std::invalid_argument("generate_bundle: need T > t0");
    if (n_fine < 1) throw std::invalid_argument("generate_bundle: need n_fine >= 1");
    if (d < 1) throw std::invalid_argument("generate_bundle: need d >= 1");

    PathBundle b;
    b.d = d;
    b.t0 = t0;
    b.T = T;
    b.n_fine = n_fine;
    b.dt_fine = (T - t0) / static_cast<double>(n_fine);
    b.kind = kind;
    b.increments.assign(static_cast<std::size_t>(d), std::vector<double>(n_fine));
    for (int i = 0; i < d; ++i) {
        for (std::size_t n = 0; n < n_fine; ++n) {
            b.increments[static_cast<std::size_t>(i)][n] =
                (kind == IncrementKind::gaussian) ? stream.wiener_increment(b.dt_fine)
                                                  : stream.binomial_increment(b.dt_fine);
        }
    }
    return b;
}

CoarseView coarsen(const PathBundle& bundle, std::size_t factor) {
    if (factor < 1 || bundle.n_fine % factor != 0)
        throw std::invalid_argument("coarsen: factor must divide n_fine");
    return CoarseView{&bundle, factor};
}

std::vector<double> partial_sums(const CoarseView& view, int comp) {
    const std::size_t n = view.steps();
    std::vector<double> w(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) w[j + 1] = w[j] + view.increment(comp, j);
    return w;
}

void dump_path_csv(const CoarseView& view, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("dump_path_csv: cannot open " + path);
    std::fprintf(f, "t");
    for (int i = 0; i < view.parent->d; ++i) std::fprintf(f, ",W%d", i + 1);
    std::fprintf(f, "\n");
    std::vector<std::vector<double>> w;
    for (int i = 0; i < view.parent->d; ++i) w.push_back(partial_sums(view, i));
    const double dt = view.dt();
    for (std::size_t j = 0; j <= view.steps(); ++j) {
        std::fprintf(f, "%.17g", view.parent->t0 + dt * static_cast<double>(j));
        for (int i = 0; i < view.parent->d; ++i)
            std::fprintf(f, ",%.17g", w[static_cast<std::size_t>(i)][j]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace sdesim
