// Truncated expansions ("jets") of modelled quantities.  A jet maps pairs
// (symbol, derivative word) to exact polynomial coefficients.  The derivative
// word records, for every integration node of the symbol in pre-order, how
// many derivatives in the kernel parameter the corresponding kernel carries
// (0 or 1); higher orders are unsupported and raise an error if ever needed.
//
// Only polynomial-free sectors are tracked: coefficients of sectors carrying
// monomial factors would involve derivatives of the solution itself, which
// the atom algebra deliberately omits.  No renormalised quantity computed
// here receives contributions from those sectors.
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "quasikit/coeffpoly.h"
#include "quasikit/symbol.h"

namespace qk {

using DeltaWord = std::vector<uint8_t>;  // entries 0 (delta) or 1 (delta')

struct JetKey {
    SymPtr sym;
    DeltaWord word;
};
struct JetKeyLess {
    bool operator()(const JetKey& a, const JetKey& b) const {
        int c = sym_cmp(a.sym, b.sym);
        if (c != 0) return c < 0;
        return a.word < b.word;
    }
};

struct Jet {
    Degree cutoff;
    std::map<JetKey, CoeffPoly, JetKeyLess> terms;

    bool empty() const { return terms.empty(); }
    // coefficient of the unit symbol
    CoeffPoly one_part() const;
    // coefficient of an arbitrary (symbol, word) sector, zero if absent
    CoeffPoly coeff(const SymPtr& sym, const DeltaWord& word) const;
    std::string str() const;
};

// Inserts coeff at the canonical form of (sym, word); drops sectors at or
// above the jet cutoff and sectors containing monomial factors.
void jet_add_term(Jet& jet, const SymPtr& sym, const DeltaWord& word, const CoeffPoly& coeff,
                  const DegreeParams& dp);

Jet jet_zero(const Degree& cutoff);
Jet jet_from_one(const CoeffPoly& c, const Degree& cutoff);

Jet jet_add(const Jet& a, const Jet& b);                    // cutoffs must agree
Jet jet_scale(const Jet& a, const CoeffPoly& c);
Jet jet_mul(const Jet& a, const Jet& b, const Degree& cutoff, const DegreeParams& dp);

// f(U) for a smooth f given by Taylor data {f(u), f'(u), ...} at the base
// point.  Errors out if the cutoff requires more Taylor data than supplied.
Jet jet_compose_smooth(const std::vector<CoeffPoly>& taylor, const Jet& U, const Degree& cutoff,
                       const DegreeParams& dp);

// Spatial derivative: shifts every integration root k -> k + (0,1); the unit
// sector is dropped (its derivative is a monomial sector).
Jet jet_deriv_x(const Jet& U, const Degree& cutoff, const DegreeParams& dp);

// The parametrised integration map applied to a jet: ell derivatives in the
// kernel parameter, spatial multiindex k, with the kernel parameter moving as
// b = a(U).  `recon` is the atom holding the reconstruction value of the
// result at the base point (its unit sector).  Corrections from re-centering
// the kernel parameter enter through powers of the positive-degree part of
// a_of_U.
Jet jet_integrate(const Jet& f_hat, int ell, const std::array<int, 2>& k, Atom recon,
                  const Degree& cutoff, const Jet& a_of_U, const DegreeParams& dp);

// Jets of the coupled fixed point for the gradient-squared equation:
//   u   = I(a(u), f) + initial part,          f = F0(u) du^2 + F1(u) xi
//   V3 = I_1 + hat I_1, V2 = I_2 + hat I_2, V1 = I_1' + hat I_1'
// expanded to the sector cutoffs needed by the renormalised constant-order
// correction.  Computed by sweeping the system to a (jet-level) fixed point.
struct SystemJets {
    DegreeParams dp;
    Jet U, DU, V1, V2, V3, Q, F_hat;
    int sweeps = 0;
};
SystemJets expand_system();

// Constant-order shift produced by the renormalisation group element that
// subtracts the divergent model expectations:
//   sector (Xi * I(Xi)),  word d      -> -coeff * C1
//   sector (Xi * I(Xi)),  word d'     -> -coeff * C1'
//   sector (I'(Xi))^2,    word dd     -> -coeff * C2
//   sector (I'(Xi))^2,    word dd'    -> -coeff * C2_1
// All other sectors contribute nothing.
CoeffPoly apply_renorm(const Jet& f_hat);

// The constant-order correction E = <shift of f> / (1 - a'(u) v3), reduced to
// a local function of u.  With `use_identity` the relations C1' = C2 + 2a C2_1
// and C1 = a C2 are applied first; the division is then exact and all
// reconstruction values v1..v3 cancel.  Without it, the obstruction remains
// and is reported through `remainder`.
struct CountertermResult {
    CoeffPoly numerator;     // shift of f_hat, with q expanded
    CoeffPoly quotient;      // local form in the C2 presentation
    CoeffPoly quotient_c1;   // same with C2 = C1/a substituted
    CoeffPoly remainder;     // zero iff divisible
    bool divisible = false;
    bool used_identity = false;
};
CountertermResult counterterm(const SystemJets& sys, bool use_identity);

// Checks the final shape -(C1(a(u))/a(u)) * (a F1' F1 + F1^2 F0 - a' F1^2)
// and produces the semilinear specialization (a == 1, a' == a'' == 0).
struct TheoremMap {
    bool matches = false;
    CoeffPoly combo;        // a F1' F1 + F1^2 F0 - a' F1^2
    CoeffPoly semilinear;   // -C1 (F1' F1 + F1^2 F0)
};
TheoremMap theorem_constant_map(const CountertermResult& ct);

}  // namespace qk
