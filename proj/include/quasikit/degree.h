// Degrees of the form r + m*kappa where r is rational, m an integer and
// kappa an infinitesimally small positive bookkeeping parameter.  Orders
// lexicographically: (r, m) < (r', m') iff r < r' or (r == r' and m < m').
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "quasikit/rational.h"

namespace qk {

struct Degree {
    Rational r;        // rational part
    long long m = 0;   // multiple of kappa

    Degree() = default;
    Degree(Rational rr, long long mm = 0) : r(rr), m(mm) {}

    friend Degree operator+(const Degree& a, const Degree& b) {
        return Degree(a.r + b.r, a.m + b.m);
    }
    friend Degree operator-(const Degree& a, const Degree& b) {
        return Degree(a.r - b.r, a.m - b.m);
    }
    Degree operator-() const { return Degree(-r, -m); }
    friend Degree operator*(long long k, const Degree& d) {
        return Degree(Rational(k) * d.r, k * d.m);
    }

    friend bool operator==(const Degree& a, const Degree& b) { return a.r == b.r && a.m == b.m; }
    friend bool operator!=(const Degree& a, const Degree& b) { return !(a == b); }
    friend bool operator<(const Degree& a, const Degree& b) {
        if (a.r != b.r) return a.r < b.r;
        return a.m < b.m;
    }
    friend bool operator>(const Degree& a, const Degree& b) { return b < a; }
    friend bool operator<=(const Degree& a, const Degree& b) { return !(b < a); }
    friend bool operator>=(const Degree& a, const Degree& b) { return !(a < b); }

    // e.g. "-3/2+1k", "2", "3k", "-1/2-2k", "0"
    std::string str() const {
        if (m == 0) return r.str();
        std::string ks = std::to_string(m) + "k";
        if (r.is_zero()) return ks;
        if (m > 0) return r.str() + "+" + ks;
        return r.str() + ks;  // minus sign carried by m
    }
};

// Parses "<rational>", "<int>k" or "<rational>(+|-)<int>k"; bare "k" means "1k".
Degree parse_degree(const std::string& s);

// Parabolic scaling weights, one per coordinate (time first).
struct ScalingSpec {
    std::vector<int> s{2, 1};

    int dim() const { return (int)s.size(); }
    long long weight(const std::vector<int>& k) const {
        if (k.size() != s.size())
            throw std::invalid_argument("multiindex dimension mismatch");
        long long w = 0;
        for (size_t i = 0; i < s.size(); ++i) {
            if (k[i] < 0) throw std::invalid_argument("negative multiindex entry");
            w += (long long)s[i] * k[i];
        }
        return w;
    }
    long long total() const {  // |s|
        long long t = 0;
        for (int v : s) t += v;
        return t;
    }
};

}  // namespace qk
