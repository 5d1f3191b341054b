// Exact rational arithmetic over 64-bit integers.
// Intermediates are computed in 128-bit and checked when narrowing, so
// overflow aborts loudly instead of corrupting symbolic computations.
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qk {

struct Rational {
    long long num = 0;
    long long den = 1;  // invariant: den > 0, gcd(|num|, den) == 1

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    static long long narrow(__int128 v) {
        if (v > (__int128)INT64_MAX || v < (__int128)INT64_MIN)
            throw std::overflow_error("rational overflow");
        return (long long)v;
    }

    void normalize() {
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
        if (den < 0) { num = narrow(-(__int128)num); den = narrow(-(__int128)den); }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num * b.den + (__int128)b.num * a.den;
        __int128 d = (__int128)a.den * b.den;
        return reduce(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num * b.den - (__int128)b.num * a.den;
        __int128 d = (__int128)a.den * b.den;
        return reduce(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return reduce((__int128)a.num * b.num, (__int128)a.den * b.den);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw std::domain_error("rational division by zero");
        return reduce((__int128)a.num * b.den, (__int128)a.den * b.num);
    }
    Rational operator-() const { return Rational(narrow(-(__int128)num), den); }

    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    bool is_zero() const { return num == 0; }
    bool is_integer() const { return den == 1; }
    double to_double() const { return (double)num / (double)den; }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

  private:
    static Rational reduce(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 an = n < 0 ? -n : n;
        __int128 g = gcd128(an, d);
        if (g > 1) { n /= g; d /= g; }
        Rational r;
        r.num = narrow(n);
        r.den = narrow(d);
        if (r.num == 0) r.den = 1;
        return r;
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }
};

// Parses "p" or "p/q" with optional leading sign.
inline Rational parse_rational(const std::string& s) {
    size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::logic_error&) {
        throw std::invalid_argument("cannot parse rational: '" + s + "'");
    }
}

}  // namespace qk
