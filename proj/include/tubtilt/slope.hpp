#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include "tubtilt/error.hpp"

namespace tubtilt {

/// Exact element of Q ∪ {∞}. Finite values are kept in lowest terms with a
/// positive denominator; ∞ is stored as 1/0 and compares above every
/// rational.
class Slope {
public:
    constexpr Slope() = default;
    constexpr Slope(std::int64_t integer) : num_(integer), den_(1) {}

    Slope(std::int64_t num, std::int64_t den) {
        if (den == 0) {
            require(num != 0, ErrorCode::ValidationError, "0/0 is not a slope");
            num_ = 1;
            den_ = 0;
            return;
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num, den);
        num_ = num / g;
        den_ = den / g;
    }

    static Slope infinity() { return Slope(1, 0); }

    bool is_inf() const noexcept { return den_ == 0; }
    bool is_integer() const noexcept { return den_ == 1; }
    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    /// Greatest integer not above a finite slope.
    std::int64_t floor() const {
        require(!is_inf(), ErrorCode::PreconditionViolated, "floor of infinity");
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }

    friend bool operator==(const Slope&, const Slope&) = default;

    friend std::strong_ordering operator<=>(const Slope& a, const Slope& b) {
        if (a.is_inf() || b.is_inf()) {
            return static_cast<int>(a.is_inf()) <=> static_cast<int>(b.is_inf());
        }
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        return lhs <=> rhs;
    }

    friend Slope operator+(const Slope& a, const Slope& b) {
        require(!a.is_inf() && !b.is_inf(), ErrorCode::PreconditionViolated, "adding infinite slopes");
        return Slope(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Slope operator-(const Slope& a, const Slope& b) {
        require(!a.is_inf() && !b.is_inf(), ErrorCode::PreconditionViolated, "subtracting infinite slopes");
        return Slope(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }

    std::string str() const {
        if (is_inf()) return "inf";
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Accepts `inf`, an integer, or `a/b` (any sign placement, any common
    /// factor); returns nullopt on malformed input.
    static std::optional<Slope> parse(std::string_view text) {
        auto trim = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
            return s;
        };
        text = trim(text);
        if (text == "inf" || text == "oo" || text == "infinity") return infinity();
        auto parse_int = [](std::string_view s) -> std::optional<std::int64_t> {
            if (s.empty()) return std::nullopt;
            bool neg = false;
            if (s.front() == '-' || s.front() == '+') {
                neg = s.front() == '-';
                s.remove_prefix(1);
            }
            if (s.empty() || s.size() > 17) return std::nullopt;
            std::int64_t v = 0;
            for (char ch : s) {
                if (ch < '0' || ch > '9') return std::nullopt;
                v = v * 10 + (ch - '0');
            }
            return neg ? -v : v;
        };
        const auto slash = text.find('/');
        if (slash == std::string_view::npos) {
            auto v = parse_int(text);
            if (!v) return std::nullopt;
            return Slope(*v);
        }
        auto a = parse_int(trim(text.substr(0, slash)));
        auto b = parse_int(trim(text.substr(slash + 1)));
        if (!a || !b || *b == 0) return std::nullopt;
        return Slope(*a, *b);
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace tubtilt
