#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tubtilt/error.hpp"
#include "tubtilt/slope.hpp"

namespace tubtilt {

/// A validated tubular weight sequence, stored ascending so that the last
/// weight equals p and δ(x⃗_t) = 1.
struct WeightData {
    std::vector<int> weights;
    int t = 0;
    int p = 0;
    int n = 0;
    Slope genus;

    friend bool operator==(const WeightData& a, const WeightData& b) { return a.weights == b.weights; }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(weights[i]);
        }
        return s;
    }
};

inline WeightData make_weights(std::vector<int> seq) {
    std::sort(seq.begin(), seq.end());
    static const std::vector<std::vector<int>> tubular = {
        {2, 2, 2, 2}, {3, 3, 3}, {2, 4, 4}, {2, 3, 6}};
    if (std::find(tubular.begin(), tubular.end(), seq) == tubular.end()) {
        std::string s;
        for (int w : seq) s += (s.empty() ? "" : ",") + std::to_string(w);
        fail(ErrorCode::NonTubularWeights, "weights (" + s + ") are not of tubular type");
    }
    WeightData w;
    w.weights = seq;
    w.t = static_cast<int>(seq.size());
    w.p = std::accumulate(seq.begin(), seq.end(), 1, [](int a, int b) { return std::lcm(a, b); });
    w.n = 2;
    std::int64_t sum_quot = 0;
    for (int pi : seq) {
        w.n += pi - 1;
        sum_quot += w.p / pi;
    }
    // g = 1 + ((t-2)p - Σ p/p_i) / 2
    w.genus = Slope(1) + Slope((w.t - 2) * static_cast<std::int64_t>(w.p) - sum_quot, 2);
    require(w.p == seq.back(), ErrorCode::InternalConsistency, "p differs from the largest weight");
    require(w.genus == Slope(1), ErrorCode::InternalConsistency, "tubular genus is not 1");
    return w;
}

/// Element Σ a_i x⃗_i + c·c⃗ of L(p) in normal form 0 ≤ a_i < p_i.
struct LElement {
    std::vector<int> coeffs;
    std::int64_t c = 0;

    friend bool operator==(const LElement&, const LElement&) = default;
    friend auto operator<=>(const LElement&, const LElement&) = default;
};

/// Reduces arbitrary integer coefficients to normal form using p_i x⃗_i = c⃗.
inline LElement l_normalize(const WeightData& w, const std::vector<std::int64_t>& raw, std::int64_t c) {
    require(raw.size() == w.weights.size(), ErrorCode::ValidationError, "coefficient count differs from t");
    LElement out;
    out.coeffs.resize(raw.size());
    out.c = c;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::int64_t pi = w.weights[i];
        std::int64_t q = raw[i] / pi;
        std::int64_t r = raw[i] % pi;
        if (r < 0) {
            r += pi;
            --q;
        }
        out.coeffs[i] = static_cast<int>(r);
        out.c += q;
    }
    return out;
}

inline LElement l_normalize(const WeightData& w, const LElement& x) {
    return l_normalize(w, std::vector<std::int64_t>(x.coeffs.begin(), x.coeffs.end()), x.c);
}

inline LElement l_zero(const WeightData& w) { return LElement{std::vector<int>(w.weights.size(), 0), 0}; }

/// x⃗_i for 0-based index i.
inline LElement l_x(const WeightData& w, std::size_t i) {
    LElement e = l_zero(w);
    return l_normalize(w, [&] {
        std::vector<std::int64_t> raw(w.weights.size(), 0);
        raw[i] = 1;
        return raw;
    }(), e.c);
}

inline LElement l_c(const WeightData& w, std::int64_t k = 1) {
    LElement e = l_zero(w);
    e.c = k;
    return e;
}

inline LElement l_add(const WeightData& w, const LElement& x, const LElement& y) {
    std::vector<std::int64_t> raw(w.weights.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = x.coeffs[i] + y.coeffs[i];
    return l_normalize(w, raw, x.c + y.c);
}

inline LElement l_neg(const WeightData& w, const LElement& x) {
    std::vector<std::int64_t> raw(w.weights.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = -x.coeffs[i];
    return l_normalize(w, raw, -x.c);
}

inline LElement l_sub(const WeightData& w, const LElement& x, const LElement& y) {
    return l_add(w, x, l_neg(w, y));
}

inline LElement l_scale(const WeightData& w, const LElement& x, std::int64_t k) {
    std::vector<std::int64_t> raw(w.weights.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = k * x.coeffs[i];
    return l_normalize(w, raw, k * x.c);
}

/// Degree homomorphism δ: L(p) → Z with δ(x⃗_i) = p/p_i.
inline std::int64_t delta(const WeightData& w, const LElement& x) {
    std::int64_t d = x.c * w.p;
    for (std::size_t i = 0; i < x.coeffs.size(); ++i) d += static_cast<std::int64_t>(x.coeffs[i]) * (w.p / w.weights[i]);
    return d;
}

/// Dualizing element ω⃗ = Σ(c⃗ − x⃗_i) − 2c⃗.
inline LElement omega(const WeightData& w) {
    std::vector<std::int64_t> raw(w.weights.size(), -1);
    return l_normalize(w, raw, static_cast<std::int64_t>(w.t) - 2);
}

/// x⃗ ≥ 0, i.e. O(x⃗) has a nonzero section.
inline bool is_effective(const LElement& x) { return x.c >= 0; }

/// Text form `a1*x1+...+k*c` with zero terms omitted; `0` for the identity.
inline std::string l_str(const LElement& x) {
    std::string s;
    auto term = [&](std::int64_t k, const std::string& sym) {
        if (k == 0) return;
        if (k < 0) s += '-';
        else if (!s.empty()) s += '+';
        const std::int64_t a = k < 0 ? -k : k;
        if (a != 1) s += std::to_string(a) + "*";
        s += sym;
    };
    for (std::size_t i = 0; i < x.coeffs.size(); ++i) term(x.coeffs[i], "x" + std::to_string(i + 1));
    term(x.c, "c");
    return s.empty() ? "0" : s;
}

} // namespace tubtilt
