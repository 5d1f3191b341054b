// Exact multivariate polynomials in the scalar quantities of the expansion
// calculus.  The atoms are pointwise values at the base point:
//   u            solution value
//   a, a', a''   diffusion coefficient and derivatives, at u
//   F0, F1, F1'  reaction/noise coefficients and derivative, at u
//   v1, v2, v3   reconstruction values of the auxiliary kernel integrals
//   q            shorthand for 1 - a'(u) v3
//   C1, C1'      first renormalisation constant at c = a(u), and its total
//                c-derivative
//   C2, C2_1     second renormalisation constant at (c, cbar) = (a(u), a(u)),
//                and its partial derivative in the first argument
//   t            scratch unknown used by linear solves inside the fixed point
// Coefficients are exact rationals; all algebra is exact.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quasikit/rational.h"

namespace qk {

enum class Atom : int {
    u, a, ap, app, F0, F1, F1p, v1, v2, v3, q, C1, dC1, C2, d1C2, tmp, count
};
constexpr int kNumAtoms = (int)Atom::count;
const char* atom_name(Atom a);

struct Monomial {
    std::array<int16_t, kNumAtoms> e{};

    int total_degree() const {
        int t = 0;
        for (auto v : e) t += v;
        return t;
    }
    bool is_unit() const {
        for (auto v : e)
            if (v != 0) return false;
        return true;
    }
    // graded lexicographic order
    friend bool operator<(const Monomial& x, const Monomial& y) {
        int tx = x.total_degree(), ty = y.total_degree();
        if (tx != ty) return tx < ty;
        for (int i = 0; i < kNumAtoms; ++i)
            if (x.e[i] != y.e[i]) return x.e[i] < y.e[i];
        return false;
    }
    friend bool operator==(const Monomial& x, const Monomial& y) { return x.e == y.e; }
};

struct CoeffPoly {
    std::map<Monomial, Rational> terms;  // nonzero coefficients only

    CoeffPoly() = default;
    static CoeffPoly constant(const Rational& c);
    static CoeffPoly atom(Atom a, int power = 1);

    bool is_zero() const { return terms.empty(); }
    bool is_constant() const;
    // degree in one atom (0 for the zero polynomial)
    int degree_in(Atom a) const;

    friend CoeffPoly operator+(const CoeffPoly& x, const CoeffPoly& y);
    friend CoeffPoly operator-(const CoeffPoly& x, const CoeffPoly& y);
    friend CoeffPoly operator*(const CoeffPoly& x, const CoeffPoly& y);
    CoeffPoly operator-() const;
    CoeffPoly& operator+=(const CoeffPoly& o) { return *this = *this + o; }
    CoeffPoly& operator-=(const CoeffPoly& o) { return *this = *this - o; }
    CoeffPoly& operator*=(const CoeffPoly& o) { return *this = *this * o; }
    friend bool operator==(const CoeffPoly& x, const CoeffPoly& y) { return x.terms == y.terms; }
    friend bool operator!=(const CoeffPoly& x, const CoeffPoly& y) { return !(x == y); }

    CoeffPoly scaled(const Rational& c) const;
    CoeffPoly pow(int n) const;

    // Substitutes `rep` for every occurrence of atom `x`.  Negative exponents
    // of `x` require `rep` to be a single monomial (so it can be inverted).
    CoeffPoly subst(Atom x, const CoeffPoly& rep) const;

    // Human-readable form, e.g. "q*F1^2 - 2*v3*a''".
    std::string str() const;
    // Machine-readable s-expression, e.g. "(+ (* q (^ F1 2)) (* -2 v3 a''))".
    std::string sexpr() const;
};

// Polynomial division by a single divisor under the graded lexicographic
// order: returns quotient and remainder with f = q*divisor + r and no term of
// r divisible by the leading term of the divisor.  The division is exact iff
// the remainder is zero.  Requires nonnegative exponents throughout.
struct DivisionResult {
    CoeffPoly quotient;
    CoeffPoly remainder;
    bool exact() const { return remainder.is_zero(); }
};
DivisionResult poly_divide(const CoeffPoly& f, const CoeffPoly& divisor);

}  // namespace qk
