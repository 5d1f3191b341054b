// Rule-driven generation of the symbol set for a quasilinear equation whose
// right-hand side is built from noise, squared gradients and smooth coefficient
// functions of the solution.  Generation runs a fixed-point iteration over the
// right-hand-side symbols and then closes the output under subsymbols and
// re-expansion; it refuses to proceed if the rule fails to be subcritical.
#pragma once

#include <string>
#include <vector>

#include "quasikit/symbol.h"

namespace qk {

// One additive term of the right-hand side, described by how many noise
// factors and how many gradient factors it carries.  Smooth coefficient
// functions of the solution contribute arbitrarily many further factors of
// positive degree (monomials or integrated symbols); that closure is shared
// by all monomials.
struct RuleMonomial {
    int noise_factors = 0;
    int deriv_factors = 0;
};

struct RuleSpec {
    std::string name;
    std::vector<RuleMonomial> monomials;
    bool smooth_closure = true;
};

// Rule for (d_t - a(u) d_x^2) u = F0(u) (d_x u)^2 + F1(u) xi:
// monomials {xi}, {du}, {du, du} with smooth closure.
RuleSpec gkpz_rule();

struct GenerateParams {
    DegreeParams deg;
    Degree cutoff{Rational(0), 1};  // keep right-hand-side symbols of degree < cutoff
    int guard_max_symbols = 20000;
    int guard_max_rounds = 64;
};

struct GenerateResult {
    std::vector<SymPtr> rhs;   // right-hand-side symbols below the cutoff
    std::vector<SymPtr> all;   // closure under subsymbols and re-expansion, plus monomials
};

GenerateResult generate(const RuleSpec& rule, const GenerateParams& gp);

// A failed lower bound from the pairwise/triple integrability conditions that
// every symbol with at least two noise occurrences must satisfy.
struct SuperregViolation {
    SymPtr sym;
    Degree degree;        // degree at the checked noise regularity
    Degree bound;         // violated strict lower bound
    std::string condition;
};

// Checks the integrability lower bounds for all given symbols, with degrees
// recomputed at noise regularity `alpha`.  Empty result means all pass.
std::vector<SuperregViolation> check_superregularity(const std::vector<SymPtr>& symbols,
                                                     const Degree& alpha,
                                                     const Rational& beta,
                                                     const ScalingSpec& scaling);

}  // namespace qk
