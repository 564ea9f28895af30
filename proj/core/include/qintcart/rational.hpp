#pragma once

#include <cstdint>
#include <complex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace qintcart {

struct expr_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact rational over int64, den > 0, reduced. Arithmetic is overflow-checked;
// callers fall back to floating point when a checked op reports overflow.
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational make(long long n, long long d) {
        if (d == 0) throw expr_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        return Rational{n, d};
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }
    bool is_one() const { return num == 1 && den == 1; }
    bool is_integer() const { return den == 1; }

    std::string str() const {
        std::string s = std::to_string(num);
        if (den != 1) s += "/" + std::to_string(den);
        return s;
    }
};

namespace detail {

inline bool fits64(__int128 v) {
    return v >= -static_cast<__int128>(INT64_MAX) - 1 && v <= static_cast<__int128>(INT64_MAX);
}

inline std::optional<Rational> checked_make(__int128 n, __int128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    if (!fits64(n) || !fits64(d)) return std::nullopt;
    return Rational{static_cast<long long>(n), static_cast<long long>(d)};
}

} // namespace detail

inline std::optional<Rational> rat_add(Rational a, Rational b) {
    return detail::checked_make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                                static_cast<__int128>(a.den) * b.den);
}
inline std::optional<Rational> rat_mul(Rational a, Rational b) {
    return detail::checked_make(static_cast<__int128>(a.num) * b.num,
                                static_cast<__int128>(a.den) * b.den);
}
inline int rat_compare(Rational a, Rational b) {
    __int128 l = static_cast<__int128>(a.num) * b.den;
    __int128 r = static_cast<__int128>(b.num) * a.den;
    return l < r ? -1 : (l > r ? 1 : 0);
}

// A real numeric literal: exact rational when possible, double otherwise.
// Exactness degrades silently on int64 overflow; floats never promote back.
class Number {
public:
    Number() : exact_(true), q_{0, 1} {}
    Number(long long n) : exact_(true), q_{n, 1} {}
    static Number exact(Rational q) { Number n; n.exact_ = true; n.q_ = q; return n; }
    static Number approx(double d) { Number n; n.exact_ = false; n.d_ = d; return n; }

    bool is_exact() const { return exact_; }
    const Rational& rational() const { return q_; }
    double value() const { return exact_ ? q_.value() : d_; }
    std::complex<double> as_complex() const { return {value(), 0.0}; }

    bool is_zero() const { return exact_ ? q_.is_zero() : d_ == 0.0; }
    bool is_one() const { return exact_ ? q_.is_one() : d_ == 1.0; }
    bool is_minus_one() const { return exact_ ? (q_.num == -1 && q_.den == 1) : d_ == -1.0; }
    bool negative() const { return exact_ ? q_.num < 0 : d_ < 0.0; }

    Number neg() const {
        if (exact_) return exact(Rational{-q_.num, q_.den});
        return approx(-d_);
    }

    Number add(const Number& o) const {
        if (exact_ && o.exact_) {
            if (auto r = rat_add(q_, o.q_)) return exact(*r);
        }
        return approx(value() + o.value());
    }

    Number mul(const Number& o) const {
        if (exact_ && o.exact_) {
            if (auto r = rat_mul(q_, o.q_)) return exact(*r);
        }
        return approx(value() * o.value());
    }

    // Integer power; negative exponents invert (throws on exact zero base).
    Number pow(long long e) const {
        if (e == 0) return Number(1);
        bool inv = e < 0;
        unsigned long long k = inv ? static_cast<unsigned long long>(-(e + 1)) + 1ull
                                   : static_cast<unsigned long long>(e);
        if (is_zero()) {
            if (inv) throw expr_error("zero raised to a negative power");
            return Number(0);
        }
        Number acc(1), base = *this;
        while (k) {
            if (k & 1ull) acc = acc.mul(base);
            base = base.mul(base);
            k >>= 1ull;
        }
        if (!inv) return acc;
        if (acc.exact_) return exact(Rational::make(acc.q_.den, acc.q_.num));
        return approx(1.0 / acc.d_);
    }

    int compare(const Number& o) const {
        if (exact_ != o.exact_) return exact_ ? -1 : 1;
        if (exact_) return rat_compare(q_, o.q_);
        return d_ < o.d_ ? -1 : (d_ > o.d_ ? 1 : 0);
    }

    bool operator==(const Number& o) const { return compare(o) == 0 && exact_ == o.exact_; }

    uint64_t hash() const {
        if (exact_) return 0x51ull ^ (static_cast<uint64_t>(q_.num) * 0x9E3779B97F4A7C15ull)
                         ^ (static_cast<uint64_t>(q_.den) * 0xC2B2AE3D27D4EB4Full);
        uint64_t b;
        static_assert(sizeof(double) == sizeof(uint64_t));
        __builtin_memcpy(&b, &d_, sizeof(b));
        return 0x52ull ^ (b * 0x9E3779B97F4A7C15ull);
    }

    std::string str() const;

private:
    bool exact_;
    Rational q_{0, 1};
    double d_ = 0.0;
};

} // namespace qintcart
