#include "quasikit/coeffpoly.h"

#include <algorithm>
#include <stdexcept>

namespace qk {

const char* atom_name(Atom a) {
    static const char* names[kNumAtoms] = {"u",  "a",  "a'", "a''", "F0", "F1", "F1'", "v1",
                                           "v2", "v3", "q",  "C1",  "C1'", "C2", "C2_1", "t"};
    int i = (int)a;
    if (i < 0 || i >= kNumAtoms) throw std::invalid_argument("bad atom");
    return names[i];
}

CoeffPoly CoeffPoly::constant(const Rational& c) {
    CoeffPoly p;
    if (!c.is_zero()) p.terms[Monomial{}] = c;
    return p;
}

CoeffPoly CoeffPoly::atom(Atom a, int power) {
    CoeffPoly p;
    Monomial m;
    m.e[(int)a] = (int16_t)power;
    p.terms[m] = Rational(1);
    return p;
}

bool CoeffPoly::is_constant() const {
    return terms.empty() || (terms.size() == 1 && terms.begin()->first.is_unit());
}

int CoeffPoly::degree_in(Atom a) const {
    int d = 0;
    for (const auto& [m, c] : terms) d = std::max(d, (int)m.e[(int)a]);
    return d;
}

CoeffPoly operator+(const CoeffPoly& x, const CoeffPoly& y) {
    CoeffPoly r = x;
    for (const auto& [m, c] : y.terms) {
        auto it = r.terms.find(m);
        if (it == r.terms.end()) {
            r.terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) r.terms.erase(it);
        }
    }
    return r;
}

CoeffPoly operator-(const CoeffPoly& x, const CoeffPoly& y) { return x + (-y); }

CoeffPoly CoeffPoly::operator-() const {
    CoeffPoly r = *this;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
}

CoeffPoly operator*(const CoeffPoly& x, const CoeffPoly& y) {
    CoeffPoly r;
    for (const auto& [mx, cx] : x.terms)
        for (const auto& [my, cy] : y.terms) {
            Monomial m;
            for (int i = 0; i < kNumAtoms; ++i) {
                int v = mx.e[i] + my.e[i];
                if (v > 30000 || v < -30000) throw std::overflow_error("monomial exponent overflow");
                m.e[i] = (int16_t)v;
            }
            Rational c = cx * cy;
            auto it = r.terms.find(m);
            if (it == r.terms.end()) {
                if (!c.is_zero()) r.terms.emplace(m, c);
            } else {
                it->second += c;
                if (it->second.is_zero()) r.terms.erase(it);
            }
        }
    return r;
}

CoeffPoly CoeffPoly::scaled(const Rational& c) const {
    CoeffPoly r;
    if (c.is_zero()) return r;
    r = *this;
    for (auto& [m, v] : r.terms) v *= c;
    return r;
}

CoeffPoly CoeffPoly::pow(int n) const {
    if (n < 0) throw std::invalid_argument("negative polynomial power");
    CoeffPoly r = constant(Rational(1));
    for (int i = 0; i < n; ++i) r = r * (*this);
    return r;
}

CoeffPoly CoeffPoly::subst(Atom x, const CoeffPoly& rep) const {
    const int ix = (int)x;
    CoeffPoly out;
    for (const auto& [m, c] : terms) {
        int e = m.e[ix];
        Monomial rest = m;
        rest.e[ix] = 0;
        CoeffPoly term;
        term.terms[rest] = c;
        if (e > 0) {
            term = term * rep.pow(e);
        } else if (e < 0) {
            if (rep.terms.size() != 1)
                throw std::domain_error(
                    "substitution into a negative power needs a monomial replacement");
            const auto& [rm, rc] = *rep.terms.begin();
            Monomial inv;
            for (int i = 0; i < kNumAtoms; ++i) inv.e[i] = (int16_t)(rm.e[i] * e);
            Rational coef(1);
            for (int i = 0; i < -e; ++i) coef /= rc;
            CoeffPoly invp;
            invp.terms[inv] = coef;
            term = term * invp;
        }
        out += term;
    }
    return out;
}

namespace {
std::string monomial_str(const Monomial& m, bool sexpr) {
    std::vector<std::string> parts;
    for (int i = 0; i < kNumAtoms; ++i) {
        if (m.e[i] == 0) continue;
        std::string nm = atom_name((Atom)i);
        if (m.e[i] == 1)
            parts.push_back(nm);
        else if (sexpr)
            parts.push_back("(^ " + nm + " " + std::to_string(m.e[i]) + ")");
        else
            parts.push_back(nm + "^" + std::to_string(m.e[i]));
    }
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sexpr ? " " : "*";
        out += parts[i];
    }
    return out;
}
}  // namespace

std::string CoeffPoly::str() const {
    if (terms.empty()) return "0";
    // highest order first reads more naturally
    std::string out;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        const auto& [m, c] = *it;
        Rational ac = c;
        bool neg = c.num < 0;
        if (neg) ac = -ac;
        if (out.empty()) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        std::string ms = monomial_str(m, false);
        if (ms.empty()) {
            out += ac.str();
        } else {
            if (!(ac == Rational(1))) out += ac.str() + "*";
            out += ms;
        }
    }
    return out;
}

std::string CoeffPoly::sexpr() const {
    if (terms.empty()) return "0";
    std::vector<std::string> parts;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        const auto& [m, c] = *it;
        std::string ms = monomial_str(m, true);
        int natoms = 0;
        for (auto v : m.e)
            if (v != 0) ++natoms;
        if (ms.empty()) {
            parts.push_back(c.str());
        } else if (c == Rational(1)) {
            parts.push_back(natoms == 1 ? ms : "(* " + ms + ")");
        } else {
            parts.push_back("(* " + c.str() + " " + ms + ")");
        }
    }
    if (parts.size() == 1) return parts[0];
    std::string out = "(+";
    for (const auto& p : parts) out += " " + p;
    return out + ")";
}

DivisionResult poly_divide(const CoeffPoly& f, const CoeffPoly& divisor) {
    if (divisor.is_zero()) throw std::domain_error("polynomial division by zero");
    for (const auto& [m, c] : f.terms)
        for (auto v : m.e)
            if (v < 0) throw std::domain_error("polynomial division with negative exponents");
    for (const auto& [m, c] : divisor.terms)
        for (auto v : m.e)
            if (v < 0) throw std::domain_error("polynomial division with negative exponents");

    const auto& [lm, lc] = *divisor.terms.rbegin();  // leading term under grlex
    DivisionResult res;
    CoeffPoly r = f;
    while (!r.is_zero()) {
        const auto& [rm, rc] = *r.terms.rbegin();
        bool divides = true;
        Monomial qm;
        for (int i = 0; i < kNumAtoms; ++i) {
            int v = rm.e[i] - lm.e[i];
            if (v < 0) {
                divides = false;
                break;
            }
            qm.e[i] = (int16_t)v;
        }
        if (divides) {
            CoeffPoly qt;
            qt.terms[qm] = rc / lc;
            res.quotient += qt;
            r -= qt * divisor;
        } else {
            CoeffPoly move;
            move.terms[rm] = rc;
            res.remainder += move;
            r -= move;
        }
    }
    return res;
}

}  // namespace qk
