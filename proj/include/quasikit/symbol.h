// Formal symbols for the bookkeeping algebra: 1, Xi (noise), monomials X^k,
// abstract integrations I[k](tau) and products.  Symbols are immutable trees
// shared via shared_ptr; `canon` produces the canonical representative
// (sorted product factors, merged monomial factors, flattened nesting).
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "quasikit/degree.h"

namespace qk {

enum class SymKind { One, Noise, Poly, Int, Prod };

struct Symbol;
using SymPtr = std::shared_ptr<const Symbol>;

struct Symbol {
    SymKind kind;
    std::vector<int> k;        // Poly: monomial exponent; Int: derivative multiindex
    SymPtr child;              // Int only
    std::vector<SymPtr> kids;  // Prod only (>= 2 entries, no One/Prod entries)
};

// Constructors.  `prod` flattens nested products and drops unit factors but
// does not sort or merge; use `canon` for the canonical form.
SymPtr sym_one();
SymPtr sym_noise();
SymPtr sym_poly(const std::vector<int>& k);
SymPtr sym_int(const std::vector<int>& k, SymPtr tau);
SymPtr sym_prod(const std::vector<SymPtr>& factors);

// Total order on symbol trees; 0 iff structurally equal.
int sym_cmp(const SymPtr& a, const SymPtr& b);
bool sym_equal(const SymPtr& a, const SymPtr& b);
struct SymLess {
    bool operator()(const SymPtr& a, const SymPtr& b) const { return sym_cmp(a, b) < 0; }
};

// Canonical representative: children canonicalized, product factors sorted,
// monomial factors merged, Poly(0) collapsed to One.
SymPtr canon(const SymPtr& t);

struct DegreeParams {
    Degree alpha{Rational(-3, 2), 1};  // degree of Xi
    Rational beta{2};                  // order gain of I[0]
    ScalingSpec scaling;
};

Degree sym_degree(const SymPtr& t, const DegreeParams& p);
int param_count(const SymPtr& t);   // number of integration nodes in the tree
int noise_count(const SymPtr& t);   // number of Xi leaves

// The set map G: all symbols that can appear in the local re-expansion of t
// under a change of base point.  Results are canonical, sorted, unique.
std::vector<SymPtr> g_set(const SymPtr& t, const DegreeParams& p);

// ASCII forms: "1", "Xi", "X[1,0]", "I[0,1](Xi)", "(Xi*I[0,0](Xi))".
std::string sym_format(const SymPtr& t);
SymPtr sym_parse(const std::string& s);

}  // namespace qk
