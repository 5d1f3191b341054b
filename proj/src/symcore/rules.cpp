#include "quasikit/rules.h"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace qk {

RuleSpec gkpz_rule() {
    RuleSpec r;
    r.name = "gkpz";
    r.monomials = {{1, 0}, {0, 1}, {0, 2}};
    r.smooth_closure = true;
    return r;
}

namespace {

using SymSet = std::set<SymPtr, SymLess>;

struct Factor {
    SymPtr sym;
    Degree deg;
};

// Enumerates multisets over `factors` (indices non-decreasing), recursing as
// long as the running degree stays below the cutoff; every visited state is
// reported through `emit`.
template <typename Emit>
void closure_rec(const std::vector<Factor>& factors, size_t start, std::vector<SymPtr>& stack,
                 const Degree& cur, const Degree& cutoff, const Emit& emit) {
    emit(stack, cur);
    for (size_t i = start; i < factors.size(); ++i) {
        Degree next = cur + factors[i].deg;
        if (!(next < cutoff)) continue;  // factors have positive degree, no recovery
        stack.push_back(factors[i].sym);
        closure_rec(factors, i, stack, next, cutoff, emit);
        stack.pop_back();
    }
}

// Chooses exactly `want` factors (indices non-decreasing) from `factors`,
// then hands off to `emit`; prunes when even the cheapest completion fails.
template <typename Emit>
void choose_rec(const std::vector<Factor>& factors, const Degree& min_deg, size_t start,
                int want, std::vector<SymPtr>& stack, const Degree& cur, const Degree& cutoff,
                const Emit& emit) {
    if (want == 0) {
        emit(stack, cur);
        return;
    }
    Degree floor_rest = cur + (want - 1) * min_deg;
    for (size_t i = start; i < factors.size(); ++i) {
        Degree next = floor_rest + factors[i].deg;
        if (!(next < cutoff)) continue;
        stack.push_back(factors[i].sym);
        choose_rec(factors, min_deg, i, want - 1, stack, cur + factors[i].deg, cutoff, emit);
        stack.pop_back();
    }
}

Degree min_degree(const std::vector<Factor>& v) {
    Degree m = v.front().deg;
    for (const auto& f : v) m = std::min(m, f.deg, [](const Degree& a, const Degree& b) { return a < b; });
    return m;
}

}  // namespace

GenerateResult generate(const RuleSpec& rule, const GenerateParams& gp) {
    const DegreeParams& dp = gp.deg;
    const Degree zero(Rational(0), 0);
    const std::vector<int> k_plain(dp.scaling.dim(), 0);
    std::vector<int> k_grad(dp.scaling.dim(), 0);
    k_grad.back() = 1;  // one spatial derivative

    SymSet w_rhs;
    for (int round = 0;; ++round) {
        if (round >= gp.guard_max_rounds)
            throw std::runtime_error("rule '" + rule.name +
                                     "' did not stabilize; not subcritical at this cutoff");

        // Factor pools for this round.
        std::vector<Factor> d_factors, p_factors;
        for (const auto& w : w_rhs) {
            SymPtr d = canon(sym_int(k_grad, w));
            d_factors.push_back({d, sym_degree(d, dp)});
            SymPtr p = canon(sym_int(k_plain, w));
            Degree pd = sym_degree(p, dp);
            if (!(zero < pd))
                throw std::runtime_error("rule '" + rule.name + "' is not subcritical: factor " +
                                         sym_format(p) + " has degree " + pd.str());
            p_factors.push_back({p, pd});
        }
        if (rule.smooth_closure) {
            // Positive-degree monomial factors small enough to ever fit under
            // the cutoff next to the cheapest admissible base.
            Degree min_base = gp.cutoff;  // fallback: no monomials enumerable
            for (const auto& mon : rule.monomials) {
                if (mon.deriv_factors > 0 && d_factors.empty()) continue;
                Degree base = (long long)mon.noise_factors * dp.alpha;
                if (mon.deriv_factors > 0)
                    base = base + (long long)mon.deriv_factors * min_degree(d_factors);
                min_base = std::min(min_base, base,
                                    [](const Degree& a, const Degree& b) { return a < b; });
            }
            Degree budget = gp.cutoff - min_base;
            if (Degree(Rational(64), 0) < budget)
                throw std::runtime_error("rule '" + rule.name +
                                         "' monomial budget exploded; not subcritical");
            // enumerate j != 0 with |j|_s < budget
            std::vector<int> j(dp.scaling.dim(), 0);
            struct Rec {
                const ScalingSpec& sc;
                const Degree& budget;
                std::vector<Factor>& out;
                std::vector<int>& j;
                void go(int pos) {
                    if (pos == sc.dim()) {
                        long long w = sc.weight(j);
                        if (w > 0) out.push_back({sym_poly(j), Degree(Rational(w), 0)});
                        return;
                    }
                    for (int v = 0;; ++v) {
                        j[pos] = v;
                        if (!(Degree(Rational(sc.weight(j)), 0) < budget)) break;
                        go(pos + 1);
                    }
                    j[pos] = 0;
                }
            } rec{dp.scaling, budget, p_factors, j};
            rec.go(0);
        }

        // Candidate products per monomial shape.
        SymSet next = w_rhs;
        auto add_candidate = [&](const std::vector<SymPtr>& base, const Degree& base_deg) {
            auto finish = [&](std::vector<SymPtr> all_factors, const Degree& deg) {
                if (!(deg < gp.cutoff)) return;
                next.insert(canon(sym_prod(all_factors)));
                if ((int)next.size() > gp.guard_max_symbols)
                    throw std::runtime_error("rule '" + rule.name +
                                             "' symbol budget exceeded; not subcritical");
            };
            if (!rule.smooth_closure) {
                finish(base, base_deg);
                return;
            }
            std::vector<SymPtr> stack;
            closure_rec(p_factors, 0, stack, base_deg, gp.cutoff,
                        [&](const std::vector<SymPtr>& closure, const Degree& deg) {
                            std::vector<SymPtr> all_factors = base;
                            all_factors.insert(all_factors.end(), closure.begin(), closure.end());
                            finish(std::move(all_factors), deg);
                        });
        };

        for (const auto& mon : rule.monomials) {
            if (mon.deriv_factors > 0 && d_factors.empty()) continue;
            std::vector<SymPtr> base(mon.noise_factors, sym_noise());
            Degree base_deg = (long long)mon.noise_factors * dp.alpha;
            if (mon.deriv_factors == 0) {
                add_candidate(base, base_deg);
            } else {
                Degree min_d = min_degree(d_factors);
                std::vector<SymPtr> stack;
                choose_rec(d_factors, min_d, 0, mon.deriv_factors, stack, base_deg, gp.cutoff,
                           [&](const std::vector<SymPtr>& chosen, const Degree& deg) {
                               std::vector<SymPtr> b = base;
                               b.insert(b.end(), chosen.begin(), chosen.end());
                               add_candidate(b, deg);
                           });
            }
        }

        if (next.size() == w_rhs.size()) break;
        w_rhs = std::move(next);
    }

    // Closure: start from the kept right-hand-side symbols plus the low-degree
    // monomials, close under direct constituents and re-expansion.
    SymSet all(w_rhs);
    all.insert(sym_one());
    {
        std::vector<int> j(dp.scaling.dim(), 0);
        struct Rec {
            const ScalingSpec& sc;
            const Degree& cutoff;
            SymSet& out;
            std::vector<int>& j;
            void go(int pos) {
                if (pos == sc.dim()) {
                    out.insert(sym_poly(j));
                    return;
                }
                for (int v = 0;; ++v) {
                    j[pos] = v;
                    if (!(Degree(Rational(sc.weight(j)), 0) < cutoff)) break;
                    go(pos + 1);
                }
                j[pos] = 0;
            }
        } rec{dp.scaling, gp.cutoff, all, j};
        if (zero < gp.cutoff) rec.go(0);
    }

    std::vector<SymPtr> work(all.begin(), all.end());
    while (!work.empty()) {
        if ((int)all.size() > gp.guard_max_symbols)
            throw std::runtime_error("closure budget exceeded");
        SymPtr t = work.back();
        work.pop_back();
        std::vector<SymPtr> derived;
        if (t->kind == SymKind::Int) derived.push_back(canon(t->child));
        if (t->kind == SymKind::Prod)
            for (const auto& kid : t->kids) derived.push_back(canon(kid));
        for (const auto& g : g_set(t, dp)) derived.push_back(g);
        for (const auto& d : derived)
            if (all.insert(d).second) work.push_back(d);
    }

    GenerateResult res;
    res.rhs.assign(w_rhs.begin(), w_rhs.end());
    res.all.assign(all.begin(), all.end());
    auto by_degree = [&](const SymPtr& a, const SymPtr& b) {
        Degree da = sym_degree(a, dp), db = sym_degree(b, dp);
        if (da != db) return da < db;
        return sym_format(a) < sym_format(b);
    };
    std::sort(res.rhs.begin(), res.rhs.end(), by_degree);
    std::sort(res.all.begin(), res.all.end(), by_degree);
    return res;
}

std::vector<SuperregViolation> check_superregularity(const std::vector<SymPtr>& symbols,
                                                     const Degree& alpha, const Rational& beta,
                                                     const ScalingSpec& scaling) {
    DegreeParams dp;
    dp.alpha = alpha;
    dp.beta = beta;
    dp.scaling = scaling;
    Degree s_total(Rational(scaling.total()), 0);

    std::vector<SuperregViolation> out;
    for (const auto& t : symbols) {
        int n = noise_count(t);
        if (n < 2) continue;
        Degree deg = sym_degree(t, dp);
        auto require = [&](const Degree& bound, const std::string& cond) {
            if (!(bound < deg)) out.push_back({t, deg, bound, cond});
        };
        require(alpha, "|tau| > alpha");
        require(Degree(Rational(-scaling.total(), 2), 0), "|tau| > -|s|/2");
        if (n >= 3) require(-(s_total + alpha), "|tau| > -(|s|+alpha)");
        if (n == 2) require(-(2 * (s_total + alpha)), "|tau| > -2(|s|+alpha)");
    }
    return out;
}

}  // namespace qk
