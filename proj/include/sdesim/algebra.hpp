#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sdesim {
namespace algebra {

// Word over the alphabet {0,1,...,d} indexing iterated integrals.
using Word = std::vector<int>;

// Exact rational coefficient for word expectations and the
// Stratonovich->Ito relations.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }
    void normalize() {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    Rational operator+(const Rational& o) const { return {num * o.den + o.num * den, den * o.den}; }
    Rational operator*(const Rational& o) const { return {num * o.num, den * o.den}; }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct WordStats {
    int z = 0;      // zero letters
    int d = 0;      // nonzero "ii" blocks in the D-tiling
    int n = 0;      // z + d
    bool in_D = false;
};

// Greedy left-to-right tiling by blocks {0, ii}; the blocks are
// prefix-unambiguous so the tiling is unique when it exists.
WordStats decompose(const Word& w);

// coeff * t^power with coeff exact
struct ScaledRational {
    Rational coeff;
    int power = 0;
    double at(double t) const {
        double p = 1.0;
        for (int k = 0; k < power; ++k) p *= t;
        return coeff.value() * p;
    }
};

// E J_w = t^n / (2^d n!) on D*, 0 otherwise.
ScaledRational expected_stratonovich_exact(const Word& w);
double expected_stratonovich(const Word& w, double t);

// J_w as a linear combination of Ito words, valid for lengths 1..4.
std::vector<std::pair<Rational, Word>> strat_to_ito(const Word& w);

// E I_w: zero unless all letters are 0; then t^k/k!.
ScaledRational expected_ito_exact(const Word& w);
double expected_ito(const Word& w, double t);

using Vec = std::vector<double>;
using Field = std::function<void(const Vec&, Vec&)>;
using DField = std::function<void(const Vec&, const Vec&, Vec&)>;

// Central finite-difference directional derivative dV(y)[v].
void directional_derivative_fd(const Field& field, const Vec& y, const Vec& v, Vec& out);

// V0(y) = Vtilde0(y) - 1/2 sum_i dV_i(y)[V_i(y)].
Vec ito_drift_to_strat(const Field& drift_ito, const std::vector<Field>& diffusion,
                       const std::vector<DField>& ddiffusion, const Vec& y);
Vec strat_drift_to_ito(const Field& drift_strat, const std::vector<Field>& diffusion,
                       const std::vector<DField>& ddiffusion, const Vec& y);

// Expands (V0 + 1/2(V1^2+...+Vd^2))^k as formal D-block words and checks the
// multiset against {((1/2)^d(w), w) : w in D*, n(w)=k}.
struct SemigroupReport {
    bool ok = false;
    std::size_t word_count = 0;  // must equal (d+1)^k
    std::map<Word, Rational> expansion;
};
SemigroupReport semigroup_coefficient_check(int d, int k);

}  // namespace algebra
}  // namespace sdesim
