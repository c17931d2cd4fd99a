#include "sdesim/algebra.hpp"

#include <cmath>

namespace sdesim {
namespace algebra {

WordStats decompose(const Word& w) {
    WordStats st;
    st.in_D = true;
    std::size_t i = 0;
    while (i < w.size()) {
        if (w[i] < 0) throw std::invalid_argument("decompose: letter out of range");
        if (w[i] == 0) {
            ++st.z;
            ++i;
        } else if (i + 1 < w.size() && w[i + 1] == w[i]) {
            ++st.d;
            i += 2;
        } else {
            st.in_D = false;
            break;
        }
    }
    if (!st.in_D) {
        // z counts all zeros regardless of tiling
        st.z = 0;
        st.d = 0;
        for (int a : w) if (a == 0) ++st.z;
    }
    st.n = st.z + st.d;
    return st;
}

static long long factorial(int n) {
    long long f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

ScaledRational expected_stratonovich_exact(const Word& w) {
    const WordStats st = decompose(w);
    if (!st.in_D) return {Rational(0), 0};
    return {Rational(1, (1LL << st.d) * factorial(st.n)), st.n};
}

double expected_stratonovich(const Word& w, double t) {
    if (t < 0.0) throw std::invalid_argument("expected_stratonovich: t must be >= 0");
    return expected_stratonovich_exact(w).at(t);
}

std::vector<std::pair<Rational, Word>> strat_to_ito(const Word& w) {
    std::vector<std::pair<Rational, Word>> out;
    out.emplace_back(Rational(1), w);
    const auto eq = [&](std::size_t i, std::size_t j) {
        return w[i] == w[j] && w[i] != 0;
    };
    switch (w.size()) {
        case 0:
        case 1:
            break;
        case 2:
            if (eq(0, 1)) out.emplace_back(Rational(1, 2), Word{0});
            break;
        case 3:
            if (eq(0, 1)) out.emplace_back(Rational(1, 2), Word{0, w[2]});
            if (eq(1, 2)) out.emplace_back(Rational(1, 2), Word{w[0], 0});
            break;
        case 4:
            if (eq(0, 1) && eq(2, 3)) out.emplace_back(Rational(1, 4), Word{0, 0});
            if (eq(0, 1)) out.emplace_back(Rational(1, 2), Word{0, w[2], w[3]});
            if (eq(1, 2)) out.emplace_back(Rational(1, 2), Word{w[0], 0, w[3]});
            if (eq(2, 3)) out.emplace_back(Rational(1, 2), Word{w[0], w[1], 0});
            break;
        default:
            throw std::invalid_argument("strat_to_ito: relations available for lengths 1..4 only");
    }
    return out;
}

ScaledRational expected_ito_exact(const Word& w) {
    for (int a : w)
        if (a != 0) return {Rational(0), 0};
    const int k = static_cast<int>(w.size());
    return {Rational(1, factorial(k)), k};
}

double expected_ito(const Word& w, double t) {
    return expected_ito_exact(w).at(t);
}

void directional_derivative_fd(const Field& field, const Vec& y, const Vec& v, Vec& out) {
    double ynorm = 0.0;
    for (double yi : y) ynorm += yi * yi;
    const double eps = std::cbrt(2.220446049250313e-16) * (1.0 + std::sqrt(ynorm));
    Vec yp = y, ym = y;
    for (std::size_t i = 0; i < y.size(); ++i) {
        yp[i] += eps * v[i];
        ym[i] -= eps * v[i];
    }
    Vec fp(y.size()), fm(y.size());
    field(yp, fp);
    field(ym, fm);
    out.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = (fp[i] - fm[i]) / (2.0 * eps);
}

static Vec drift_correction(const std::vector<Field>& diffusion,
                            const std::vector<DField>& ddiffusion, const Vec& y) {
    Vec corr(y.size(), 0.0);
    Vec vi(y.size()), dv(y.size());
    for (std::size_t i = 0; i < diffusion.size(); ++i) {
        diffusion[i](y, vi);
        if (i < ddiffusion.size() && ddiffusion[i]) {
            ddiffusion[i](y, vi, dv);
        } else {
            directional_derivative_fd(diffusion[i], y, vi, dv);
        }
        for (std::size_t k = 0; k < y.size(); ++k) corr[k] += dv[k];
    }
    return corr;
}

Vec ito_drift_to_strat(const Field& drift_ito, const std::vector<Field>& diffusion,
                       const std::vector<DField>& ddiffusion, const Vec& y) {
    Vec v(y.size());
    drift_ito(y, v);
    const Vec corr = drift_correction(diffusion, ddiffusion, y);
    for (std::size_t k = 0; k < y.size(); ++k) v[k] -= 0.5 * corr[k];
    return v;
}

Vec strat_drift_to_ito(const Field& drift_strat, const std::vector<Field>& diffusion,
                       const std::vector<DField>& ddiffusion, const Vec& y) {
    Vec v(y.size());
    drift_strat(y, v);
    const Vec corr = drift_correction(diffusion, ddiffusion, y);
    for (std::size_t k = 0; k < y.size(); ++k) v[k] += 0.5 * corr[k];
    return v;
}

SemigroupReport semigroup_coefficient_check(int d, int k) {
    if (d < 1 || d > 3 || k < 0 || k > 4)
        throw std::invalid_argument("semigroup_coefficient_check: need 1<=d<=3, 0<=k<=4");

    // blocks: index 0 -> letter 0 (coeff 1); index i -> "ii" (coeff 1/2)
    SemigroupReport rep;
    std::vector<int> choice(static_cast<std::size_t>(k), 0);
    const std::size_t total = [&] {
        std::size_t t = 1;
        for (int j = 0; j < k; ++j) t *= static_cast<std::size_t>(d + 1);
        return t;
    }();
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        Word w;
        Rational c(1);
        for (int j = 0; j < k; ++j) {
            const int b = static_cast<int>(rem % static_cast<std::size_t>(d + 1));
            rem /= static_cast<std::size_t>(d + 1);
            if (b == 0) {
                w.push_back(0);
            } else {
                w.push_back(b);
                w.push_back(b);
                c = c * Rational(1, 2);
            }
        }
        auto it = rep.expansion.find(w);
        if (it == rep.expansion.end()) rep.expansion.emplace(w, c);
        else it->second = it->second + c;
    }
    rep.word_count = rep.expansion.size();

    rep.ok = rep.word_count == total;
    for (const auto& [w, c] : rep.expansion) {
        const WordStats st = decompose(w);
        if (!st.in_D || st.n != k) { rep.ok = false; break; }
        Rational expect(1);
        for (int j = 0; j < st.d; ++j) expect = expect * Rational(1, 2);
        if (!(c == expect)) { rep.ok = false; break; }
    }
    return rep;
}

}  // namespace algebra
}  // namespace sdesim
