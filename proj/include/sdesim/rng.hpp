#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace sdesim {

// Counter-based splittable random source. Every output is a pure function of
// (seed, stream_id, counter), so a stream can be replayed bit-for-bit no
// matter how paths are scheduled across workers. One stream per path;
// streams are value-like and never shared mutably.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix(seed ^ mix(stream_id + 0x9E3779B97F4A7C15ULL))),
          seed_(seed), stream_id_(stream_id) {}

    // Derived stream for auxiliary draws (e.g. Levy-area randomness) that
    // must not perturb the main increment sequence.
    RngStream substream(std::uint64_t salt) const {
        return RngStream(seed_ ^ mix(salt), stream_id_);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64() {
        return mix(key_ ^ mix(++counter_));
    }

    // [0,1)
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1p-53;
    }
    // (0,1]
    double uniform01_open_zero() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
    }
    // (0,1)
    double uniform01_open_both() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
    }

    // Marsaglia polar transform of an accepted pair; S = u1^2 + u2^2 must
    // lie in (0,1).
    static std::pair<double, double> polar_transform(double u1, double u2) {
        const double s = u1 * u1 + u2 * u2;
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        return {u1 * f, u2 * f};
    }

    static std::pair<double, double> box_muller_transform(double u1, double u2) {
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * pi() * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

    static double laplace_icdf(double u, double scale) {
        const double x = u - 0.5;
        const double s = (x < 0.0) ? -1.0 : 1.0;
        return -scale * s * std::log(1.0 - 2.0 * std::fabs(x));
    }

    // Two independent standard Normals via the polar method.
    std::pair<double, double> normal_pair() {
        for (;;) {
            const double u1 = 2.0 * uniform01() - 1.0;
            const double u2 = 2.0 * uniform01() - 1.0;
            const double s = u1 * u1 + u2 * u2;
            if (s > 0.0 && s < 1.0) return polar_transform(u1, u2);
        }
    }

    std::pair<double, double> normal_box_muller() {
        const double u1 = uniform01_open_zero();
        const double u2 = uniform01();
        return box_muller_transform(u1, u2);
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        auto [a, b] = normal_pair();
        spare_ = b;
        has_spare_ = true;
        return a;
    }

    double wiener_increment(double h) {
        if (!(h > 0.0)) throw std::invalid_argument("wiener_increment: h must be > 0");
        return std::sqrt(h) * normal();
    }

    double binomial_increment(double h) {
        if (!(h > 0.0)) throw std::invalid_argument("binomial_increment: h must be > 0");
        return (next_u64() & 1u) ? std::sqrt(h) : -std::sqrt(h);
    }

    long poisson(double rate) {
        if (rate < 0.0) throw std::invalid_argument("poisson: rate must be >= 0");
        if (rate == 0.0) return 0;
        if (rate > 30.0) return poisson(rate / 2.0) + poisson(rate / 2.0);
        // inversion by sequential search (Knuth multiplication form)
        const double limit = std::exp(-rate);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01_open_zero();
        } while (p > limit);
        return k - 1;
    }

    double laplace(double scale) {
        if (!(scale > 0.0)) throw std::invalid_argument("laplace: scale must be > 0");
        return laplace_icdf(uniform01_open_both(), scale);
    }

    static constexpr double pi() { return 3.14159265358979323846; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sdesim
