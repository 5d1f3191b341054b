#include "quasikit/jet.h"

#include <algorithm>
#include <stdexcept>

namespace qk {

namespace {

bool contains_poly(const SymPtr& s) {
    switch (s->kind) {
        case SymKind::One:
        case SymKind::Noise: return false;
        case SymKind::Poly: return true;
        case SymKind::Int: return contains_poly(s->child);
        case SymKind::Prod:
            for (const auto& k : s->kids)
                if (contains_poly(k)) return true;
            return false;
    }
    return false;
}

DeltaWord slice(const DeltaWord& w, size_t pos, size_t n) {
    return DeltaWord(w.begin() + pos, w.begin() + pos + n);
}

std::pair<SymPtr, DeltaWord> canon_pair(const SymPtr& s, const DeltaWord& w);

// splits a (possibly nested) product into canonical non-product factors
void collect_factors(const SymPtr& s, const DeltaWord& w,
                     std::vector<std::pair<SymPtr, DeltaWord>>& out) {
    if (s->kind == SymKind::Prod) {
        size_t pos = 0;
        for (const auto& kid : s->kids) {
            size_t n = (size_t)param_count(kid);
            collect_factors(kid, slice(w, pos, n), out);
            pos += n;
        }
        return;
    }
    auto c = canon_pair(s, w);
    if (c.first->kind == SymKind::One) return;
    out.push_back(std::move(c));
}

std::pair<SymPtr, DeltaWord> canon_pair(const SymPtr& s, const DeltaWord& w) {
    if ((size_t)param_count(s) != w.size())
        throw std::invalid_argument("derivative word length does not match symbol");
    switch (s->kind) {
        case SymKind::One:
        case SymKind::Noise: return {s, {}};
        case SymKind::Poly: return {canon(s), {}};
        case SymKind::Int: {
            auto sub = canon_pair(s->child, slice(w, 1, w.size() - 1));
            DeltaWord nw{w[0]};
            nw.insert(nw.end(), sub.second.begin(), sub.second.end());
            return {sym_int(s->k, sub.first), std::move(nw)};
        }
        case SymKind::Prod: {
            std::vector<std::pair<SymPtr, DeltaWord>> factors;
            collect_factors(s, w, factors);
            // merge monomial factors (they carry empty words)
            std::vector<int> poly_sum;
            std::vector<std::pair<SymPtr, DeltaWord>> rest;
            for (auto& f : factors) {
                if (f.first->kind == SymKind::Poly) {
                    if (poly_sum.empty()) poly_sum.assign(f.first->k.size(), 0);
                    for (size_t i = 0; i < f.first->k.size(); ++i) poly_sum[i] += f.first->k[i];
                } else {
                    rest.push_back(std::move(f));
                }
            }
            if (!poly_sum.empty()) rest.push_back({sym_poly(poly_sum), {}});
            std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
                int c = sym_cmp(a.first, b.first);
                if (c != 0) return c < 0;
                return a.second < b.second;
            });
            std::vector<SymPtr> syms;
            DeltaWord word;
            for (const auto& f : rest) {
                syms.push_back(f.first);
                word.insert(word.end(), f.second.begin(), f.second.end());
            }
            return {sym_prod(syms), std::move(word)};
        }
    }
    throw std::logic_error("unreachable symbol kind");
}

}  // namespace

CoeffPoly Jet::one_part() const { return coeff(sym_one(), {}); }

CoeffPoly Jet::coeff(const SymPtr& sym, const DeltaWord& word) const {
    auto cp = canon_pair(sym, word);
    auto it = terms.find(JetKey{cp.first, cp.second});
    return it == terms.end() ? CoeffPoly{} : it->second;
}

std::string Jet::str() const {
    std::string out;
    for (const auto& [key, c] : terms) {
        out += sym_format(key.sym);
        if (!key.word.empty()) {
            out += " [";
            for (size_t i = 0; i < key.word.size(); ++i) {
                if (i) out += ",";
                out += key.word[i] == 0 ? "d" : "d'";
            }
            out += "]";
        }
        out += ": " + c.str() + "\n";
    }
    return out;
}

void jet_add_term(Jet& jet, const SymPtr& sym, const DeltaWord& word, const CoeffPoly& coeff,
                  const DegreeParams& dp) {
    if (coeff.is_zero()) return;
    auto cp = canon_pair(sym, word);
    if (contains_poly(cp.first)) return;  // monomial sectors are not tracked
    if (!(sym_degree(cp.first, dp) < jet.cutoff)) return;
    JetKey key{cp.first, cp.second};
    auto it = jet.terms.find(key);
    if (it == jet.terms.end()) {
        jet.terms.emplace(std::move(key), coeff);
    } else {
        it->second += coeff;
        if (it->second.is_zero()) jet.terms.erase(it);
    }
}

Jet jet_zero(const Degree& cutoff) {
    Jet j;
    j.cutoff = cutoff;
    return j;
}

Jet jet_from_one(const CoeffPoly& c, const Degree& cutoff) {
    Jet j = jet_zero(cutoff);
    if (!c.is_zero()) j.terms[JetKey{sym_one(), {}}] = c;
    return j;
}

Jet jet_add(const Jet& a, const Jet& b) {
    if (a.cutoff != b.cutoff) throw std::invalid_argument("jet cutoff mismatch in addition");
    Jet r = a;
    for (const auto& [k, c] : b.terms) {
        auto it = r.terms.find(k);
        if (it == r.terms.end()) {
            r.terms.emplace(k, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) r.terms.erase(it);
        }
    }
    return r;
}

Jet jet_scale(const Jet& a, const CoeffPoly& c) {
    Jet r = jet_zero(a.cutoff);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : a.terms) {
        CoeffPoly p = v * c;
        if (!p.is_zero()) r.terms.emplace(k, std::move(p));
    }
    return r;
}

Jet jet_mul(const Jet& a, const Jet& b, const Degree& cutoff, const DegreeParams& dp) {
    Jet r = jet_zero(cutoff);
    for (const auto& [ka, ca] : a.terms)
        for (const auto& [kb, cb] : b.terms) {
            SymPtr s = sym_prod({ka.sym, kb.sym});
            DeltaWord w = ka.word;
            w.insert(w.end(), kb.word.begin(), kb.word.end());
            jet_add_term(r, s, w, ca * cb, dp);
        }
    return r;
}

Jet jet_compose_smooth(const std::vector<CoeffPoly>& taylor, const Jet& U, const Degree& cutoff,
                       const DegreeParams& dp) {
    if (taylor.empty()) throw std::invalid_argument("empty Taylor data");
    // centered increment
    Jet xhat = jet_zero(cutoff);
    for (const auto& [k, c] : U.terms)
        if (k.sym->kind != SymKind::One) jet_add_term(xhat, k.sym, k.word, c, dp);

    Jet out = jet_from_one(taylor[0], cutoff);
    Jet power = jet_from_one(CoeffPoly::constant(Rational(1)), cutoff);
    Rational fact(1);
    for (size_t n = 1; n < taylor.size(); ++n) {
        power = jet_mul(power, xhat, cutoff, dp);
        if (power.empty()) return out;
        fact *= Rational((long long)n);
        out = jet_add(out, jet_scale(power, taylor[n].scaled(Rational(1) / fact)));
    }
    power = jet_mul(power, xhat, cutoff, dp);
    if (!power.empty())
        throw std::runtime_error("composition needs more Taylor data at this cutoff");
    return out;
}

Jet jet_deriv_x(const Jet& U, const Degree& cutoff, const DegreeParams& dp) {
    Jet r = jet_zero(cutoff);
    for (const auto& [key, c] : U.terms) {
        const SymPtr& s = key.sym;
        if (s->kind == SymKind::One) continue;  // derivative lands in monomial sectors
        auto shift_root = [](const SymPtr& t) {
            std::vector<int> k = t->k;
            k.back() += 1;
            return sym_int(k, t->child);
        };
        if (s->kind == SymKind::Int) {
            jet_add_term(r, shift_root(s), key.word, c, dp);
        } else if (s->kind == SymKind::Prod) {
            // product rule over integration-rooted factors
            for (size_t i = 0; i < s->kids.size(); ++i) {
                if (s->kids[i]->kind != SymKind::Int)
                    throw std::runtime_error("cannot differentiate sector " + sym_format(s));
                std::vector<SymPtr> kids = s->kids;
                kids[i] = shift_root(kids[i]);
                jet_add_term(r, sym_prod(kids), key.word, c, dp);
            }
        } else {
            throw std::runtime_error("cannot differentiate sector " + sym_format(s));
        }
    }
    return r;
}

namespace {
bool bracket_unit_atom(int m, const std::array<int, 2>& k, Atom* out) {
    if (k == std::array<int, 2>{0, 0} && m == 0) { *out = Atom::u; return true; }
    if (k == std::array<int, 2>{0, 0} && m == 1) { *out = Atom::v3; return true; }
    if (k == std::array<int, 2>{0, 0} && m == 2) { *out = Atom::v2; return true; }
    if (k == std::array<int, 2>{0, 1} && m == 1) { *out = Atom::v1; return true; }
    return false;
}
}  // namespace

Jet jet_integrate(const Jet& f_hat, int ell, const std::array<int, 2>& k, Atom recon,
                  const Degree& cutoff, const Jet& a_of_U, const DegreeParams& dp) {
    {
        Atom expect;
        if (bracket_unit_atom(ell, k, &expect) && expect != recon)
            throw std::invalid_argument("reconstruction atom inconsistent with operator indices");
    }
    const std::vector<int> kvec{k[0], k[1]};
    Jet out = jet_zero(cutoff);
    jet_add_term(out, sym_one(), {}, CoeffPoly::atom(recon), dp);

    // positive-degree part of a(U), driving the kernel-parameter re-centering
    Jet ahat = jet_zero(a_of_U.cutoff);
    for (const auto& [key, c] : a_of_U.terms)
        if (key.sym->kind != SymKind::One) ahat.terms.emplace(key, c);

    Jet apow = jet_from_one(CoeffPoly::constant(Rational(1)), cutoff);
    Rational fact(1);
    for (int lp = 0;; ++lp) {
        if (lp > 0) {
            apow = jet_mul(apow, ahat, cutoff, dp);
            if (apow.empty()) break;
            fact *= Rational(lp);
        }
        const int m = ell + lp;
        for (const auto& [akey, ac] : apow.terms) {
            // integration images of every tracked sector of f
            for (const auto& [fkey, fc] : f_hat.terms) {
                SymPtr img = sym_int(kvec, fkey.sym);
                SymPtr s = sym_prod({akey.sym, img});
                auto cs = canon_pair(s, [&] {
                    DeltaWord w = akey.word;
                    w.push_back((uint8_t)std::min(m, 2));
                    w.insert(w.end(), fkey.word.begin(), fkey.word.end());
                    return w;
                }());
                if (contains_poly(cs.first)) continue;
                if (!(sym_degree(cs.first, dp) < cutoff)) continue;
                if (m >= 2)
                    throw std::runtime_error(
                        "sector " + sym_format(cs.first) +
                        " needs kernel-parameter derivatives of order >= 2; unsupported");
                jet_add_term(out, cs.first, cs.second, (ac * fc).scaled(Rational(1) / fact), dp);
            }
            // unit part of the re-centering bracket
            if (lp > 0) {
                if (!(sym_degree(akey.sym, dp) < cutoff)) continue;
                Atom unit;
                if (!bracket_unit_atom(m, k, &unit))
                    throw std::runtime_error(
                        "no reconstruction atom for kernel-parameter derivative order " +
                        std::to_string(m));
                jet_add_term(out, akey.sym, akey.word,
                             (ac * CoeffPoly::atom(unit)).scaled(Rational(1) / fact), dp);
            }
        }
    }
    return out;
}

SystemJets expand_system() {
    SystemJets sys;
    const DegreeParams& dp = sys.dp;

    const Degree cut_F(Rational(-1, 2), 3);
    const Degree cut_U(Rational(1), 2);
    const Degree cut_DU(Rational(0), 2);
    const Degree cut_V3(Rational(1), 2);
    const Degree cut_V2(Rational(1, 2), 1);
    const Degree cut_V1(Rational(0), 2);
    const Degree cut_Q(Rational(1), 2);
    const Degree cut_low(Rational(1, 2), 1);   // coefficients multiplying (DU)^2
    const Degree cut_low1(Rational(0), 2);     // coefficients multiplying DU * V1

    const SymPtr IXi = sym_int({0, 0}, sym_noise());
    const CoeffPoly one_c = CoeffPoly::constant(Rational(1));
    const auto A = [](Atom a) { return CoeffPoly::atom(a); };

    Jet U = jet_zero(cut_U);
    jet_add_term(U, sym_one(), {}, A(Atom::u), dp);
    Jet F = jet_zero(cut_F);
    Jet V1 = jet_from_one(A(Atom::v1), cut_V1);
    Jet V2 = jet_from_one(A(Atom::v2), cut_V2);
    Jet V3 = jet_from_one(A(Atom::v3), cut_V3);
    Jet Q = jet_from_one(A(Atom::q), cut_Q);

    Jet xi_jet = jet_zero(cut_F);
    jet_add_term(xi_jet, sym_noise(), {}, one_c, dp);

    auto equal_jets = [](const Jet& a, const Jet& b) {
        if (a.terms.size() != b.terms.size()) return false;
        auto ia = a.terms.begin();
        auto ib = b.terms.begin();
        for (; ia != a.terms.end(); ++ia, ++ib) {
            if (!sym_equal(ia->first.sym, ib->first.sym) || ia->first.word != ib->first.word ||
                !(ia->second == ib->second))
                return false;
        }
        return true;
    };

    const int max_sweeps = 16;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        const Jet U_prev = U;
        const Jet F_prev = F;
        // --- solution component, solving for its own coefficient through a
        // scratch unknown (the kernel parameter depends on the result)
        Jet U_guess = jet_zero(cut_U);
        jet_add_term(U_guess, sym_one(), {}, A(Atom::u), dp);
        jet_add_term(U_guess, IXi, {0}, A(Atom::tmp), dp);
        Jet aU_guess = jet_compose_smooth({A(Atom::a), A(Atom::ap), A(Atom::app)}, U_guess,
                                          cut_U, dp);
        Jet J = jet_integrate(F, 0, {0, 0}, Atom::u, cut_U, aU_guess, dp);
        CoeffPoly self = J.coeff(IXi, {0});
        CoeffPoly lin_a, lin_b;
        for (const auto& [mono, c] : self.terms) {
            int e = mono.e[(int)Atom::tmp];
            if (e == 0) {
                CoeffPoly t;
                t.terms[mono] = c;
                lin_a += t;
            } else if (e == 1) {
                Monomial m = mono;
                m.e[(int)Atom::tmp] = 0;
                CoeffPoly t;
                t.terms[m] = c;
                lin_b += t;
            } else {
                throw std::runtime_error("self-coupling is not linear in the scratch unknown");
            }
        }
        CoeffPoly v3ap = A(Atom::v3) * A(Atom::ap);
        DivisionResult dr = poly_divide(lin_a.subst(Atom::q, one_c - v3ap),
                                        (one_c - lin_b).subst(Atom::q, one_c - v3ap));
        if (!dr.exact())
            throw std::runtime_error("self-coupling coefficient does not divide exactly");
        Jet U_new = jet_zero(cut_U);
        for (const auto& [key, c] : J.terms) {
            if (sym_equal(key.sym, IXi) && key.word == DeltaWord{0}) continue;
            if (c.degree_in(Atom::tmp) > 0)
                throw std::runtime_error("scratch unknown leaked into sector " +
                                         sym_format(key.sym));
            jet_add_term(U_new, key.sym, key.word, c, dp);
        }
        jet_add_term(U_new, IXi, {0}, dr.quotient, dp);
        U = U_new;

        // --- compositions at their role cutoffs
        Jet aU = jet_compose_smooth({A(Atom::a), A(Atom::ap), A(Atom::app)}, U, cut_U, dp);
        Jet apU = jet_compose_smooth({A(Atom::ap), A(Atom::app)}, U, cut_U, dp);
        Jet F1U = jet_compose_smooth({A(Atom::F1), A(Atom::F1p)}, U, cut_U, dp);
        Jet F0U = jet_compose_smooth({A(Atom::F0)}, U, cut_low, dp);
        Jet appU = jet_compose_smooth({A(Atom::app)}, U, cut_low, dp);

        Jet DU = jet_deriv_x(U, cut_DU, dp);

        // --- kernel integrals against the updated parameter jet
        V3 = jet_integrate(F, 1, {0, 0}, Atom::v3, cut_V3, aU, dp);
        V2 = jet_integrate(F, 2, {0, 0}, Atom::v2, cut_V2, aU, dp);
        V1 = jet_integrate(F, 1, {0, 1}, Atom::v1, cut_V1, aU, dp);

        // --- prefactor 1 - a'(u) V3, its unit part written as q
        Jet P = jet_mul(apU, V3, cut_Q, dp);
        Jet Q_new = jet_from_one(A(Atom::q), cut_Q);
        for (const auto& [key, c] : P.terms)
            if (key.sym->kind != SymKind::One) jet_add_term(Q_new, key.sym, key.word, -c, dp);
        Q = Q_new;

        // --- reassemble f
        Jet DU2 = jet_mul(DU, DU, cut_F, dp);
        Jet react = jet_add(jet_mul(F0U, DU2, cut_F, dp), jet_mul(F1U, xi_jet, cut_F, dp));
        Jet coef3 = jet_mul(aU, appU, cut_low, dp);
        Jet coef2 = jet_mul(jet_mul(aU, apU, cut_low, dp), apU, cut_low, dp);
        Jet coef1 = jet_mul(aU, apU, cut_low1, dp);

        Jet F_new = jet_mul(Q, react, cut_F, dp);
        F_new = jet_add(F_new, jet_mul(coef3, jet_mul(DU2, V3, cut_F, dp), cut_F, dp));
        F_new = jet_add(F_new, jet_mul(coef2, jet_mul(DU2, V2, cut_F, dp), cut_F, dp));
        F_new = jet_add(F_new,
                        jet_scale(jet_mul(coef1, jet_mul(DU, V1, cut_F, dp), cut_F, dp),
                                  CoeffPoly::constant(Rational(2))));

        bool stable = equal_jets(F_new, F_prev) && equal_jets(U, U_prev);
        F = F_new;
        sys.sweeps = sweep;
        if (stable && sweep >= 3) {
            sys.U = U;
            sys.DU = DU;
            sys.V1 = V1;
            sys.V2 = V2;
            sys.V3 = V3;
            sys.Q = Q;
            sys.F_hat = F;
            return sys;
        }
    }
    throw std::runtime_error("system expansion did not reach a fixed point");
}

CoeffPoly apply_renorm(const Jet& f_hat) {
    const SymPtr xi_ixi = canon(sym_prod({sym_noise(), sym_int({0, 0}, sym_noise())}));
    const SymPtr ipxi2 =
        canon(sym_prod({sym_int({0, 1}, sym_noise()), sym_int({0, 1}, sym_noise())}));
    CoeffPoly shift;
    for (const auto& [key, c] : f_hat.terms) {
        if (sym_equal(key.sym, xi_ixi)) {
            if (key.word == DeltaWord{0})
                shift -= c * CoeffPoly::atom(Atom::C1);
            else if (key.word == DeltaWord{1})
                shift -= c * CoeffPoly::atom(Atom::dC1);
            else
                throw std::runtime_error("unsupported derivative word on renormalised sector");
        } else if (sym_equal(key.sym, ipxi2)) {
            if (key.word == DeltaWord{0, 0})
                shift -= c * CoeffPoly::atom(Atom::C2);
            else if (key.word == DeltaWord{0, 1} || key.word == DeltaWord{1, 0})
                shift -= c * CoeffPoly::atom(Atom::d1C2);
            else
                throw std::runtime_error(
                    "second-order kernel-parameter derivative constant required; unsupported");
        }
    }
    return shift;
}

CountertermResult counterterm(const SystemJets& sys, bool use_identity) {
    const auto A = [](Atom a) { return CoeffPoly::atom(a); };
    CountertermResult res;
    res.used_identity = use_identity;

    CoeffPoly num = apply_renorm(sys.F_hat);
    CoeffPoly qexp = CoeffPoly::constant(Rational(1)) - A(Atom::v3) * A(Atom::ap);
    num = num.subst(Atom::q, qexp);
    if (use_identity) {
        num = num.subst(Atom::dC1, A(Atom::C2) + A(Atom::a) * A(Atom::d1C2).scaled(Rational(2)));
        num = num.subst(Atom::C1, A(Atom::a) * A(Atom::C2));
    }
    res.numerator = num;

    DivisionResult dr = poly_divide(num, qexp);
    res.divisible = dr.exact();
    res.quotient = dr.quotient;
    res.remainder = dr.remainder;
    if (res.divisible) res.quotient_c1 = dr.quotient.subst(Atom::C2, A(Atom::C1) * CoeffPoly::atom(Atom::a, -1));
    return res;
}

TheoremMap theorem_constant_map(const CountertermResult& ct) {
    const auto A = [](Atom a) { return CoeffPoly::atom(a); };
    TheoremMap tm;
    tm.combo = A(Atom::a) * A(Atom::F1p) * A(Atom::F1) +
               CoeffPoly::atom(Atom::F1, 2) * A(Atom::F0) -
               A(Atom::ap) * CoeffPoly::atom(Atom::F1, 2);
    CoeffPoly target = -(A(Atom::C2) * tm.combo);
    tm.matches = ct.divisible && ct.quotient == target;
    tm.semilinear = ct.quotient_c1.subst(Atom::a, CoeffPoly::constant(Rational(1)))
                        .subst(Atom::ap, CoeffPoly{})
                        .subst(Atom::app, CoeffPoly{});
    return tm;
}

}  // namespace qk
