#include "quasikit/symbol.h"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace qk {

namespace {
const SymPtr& one_singleton() {
    static SymPtr s = std::make_shared<Symbol>(Symbol{SymKind::One, {}, nullptr, {}});
    return s;
}
const SymPtr& noise_singleton() {
    static SymPtr s = std::make_shared<Symbol>(Symbol{SymKind::Noise, {}, nullptr, {}});
    return s;
}
bool all_zero(const std::vector<int>& k) {
    for (int v : k)
        if (v != 0) return false;
    return true;
}
}  // namespace

SymPtr sym_one() { return one_singleton(); }
SymPtr sym_noise() { return noise_singleton(); }

SymPtr sym_poly(const std::vector<int>& k) {
    for (int v : k)
        if (v < 0) throw std::invalid_argument("monomial exponent must be nonnegative");
    if (all_zero(k)) return sym_one();
    return std::make_shared<Symbol>(Symbol{SymKind::Poly, k, nullptr, {}});
}

SymPtr sym_int(const std::vector<int>& k, SymPtr tau) {
    if (!tau) throw std::invalid_argument("integration of null symbol");
    for (int v : k)
        if (v < 0) throw std::invalid_argument("derivative multiindex must be nonnegative");
    return std::make_shared<Symbol>(Symbol{SymKind::Int, k, std::move(tau), {}});
}

SymPtr sym_prod(const std::vector<SymPtr>& factors) {
    std::vector<SymPtr> flat;
    for (const auto& f : factors) {
        if (!f) throw std::invalid_argument("product with null factor");
        if (f->kind == SymKind::One) continue;
        if (f->kind == SymKind::Prod) {
            flat.insert(flat.end(), f->kids.begin(), f->kids.end());
        } else {
            flat.push_back(f);
        }
    }
    if (flat.empty()) return sym_one();
    if (flat.size() == 1) return flat[0];
    return std::make_shared<Symbol>(Symbol{SymKind::Prod, {}, nullptr, std::move(flat)});
}

static int kind_rank(SymKind k) {
    switch (k) {
        case SymKind::One: return 0;
        case SymKind::Noise: return 1;
        case SymKind::Poly: return 2;
        case SymKind::Int: return 3;
        case SymKind::Prod: return 4;
    }
    return 5;
}

static int vec_cmp(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

int sym_cmp(const SymPtr& a, const SymPtr& b) {
    if (a.get() == b.get()) return 0;
    int ra = kind_rank(a->kind), rb = kind_rank(b->kind);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a->kind) {
        case SymKind::One:
        case SymKind::Noise: return 0;
        case SymKind::Poly: return vec_cmp(a->k, b->k);
        case SymKind::Int: {
            int c = vec_cmp(a->k, b->k);
            if (c != 0) return c;
            return sym_cmp(a->child, b->child);
        }
        case SymKind::Prod: {
            if (a->kids.size() != b->kids.size())
                return a->kids.size() < b->kids.size() ? -1 : 1;
            for (size_t i = 0; i < a->kids.size(); ++i) {
                int c = sym_cmp(a->kids[i], b->kids[i]);
                if (c != 0) return c;
            }
            return 0;
        }
    }
    return 0;
}

bool sym_equal(const SymPtr& a, const SymPtr& b) { return sym_cmp(a, b) == 0; }

SymPtr canon(const SymPtr& t) {
    switch (t->kind) {
        case SymKind::One:
        case SymKind::Noise: return t;
        case SymKind::Poly: return sym_poly(t->k);
        case SymKind::Int: return sym_int(t->k, canon(t->child));
        case SymKind::Prod: {
            std::vector<SymPtr> kids;
            std::vector<int> poly_sum;
            for (const auto& kid : t->kids) {
                SymPtr c = canon(kid);
                if (c->kind == SymKind::One) continue;
                if (c->kind == SymKind::Prod) {  // canon of kid may flatten further
                    for (const auto& g : c->kids) {
                        if (g->kind == SymKind::Poly) {
                            if (poly_sum.empty()) poly_sum.assign(g->k.size(), 0);
                            for (size_t i = 0; i < g->k.size(); ++i) poly_sum[i] += g->k[i];
                        } else {
                            kids.push_back(g);
                        }
                    }
                } else if (c->kind == SymKind::Poly) {
                    if (poly_sum.empty()) poly_sum.assign(c->k.size(), 0);
                    if (poly_sum.size() != c->k.size())
                        throw std::invalid_argument("mixed monomial dimensions in product");
                    for (size_t i = 0; i < c->k.size(); ++i) poly_sum[i] += c->k[i];
                } else {
                    kids.push_back(c);
                }
            }
            if (!poly_sum.empty() && !all_zero(poly_sum)) kids.push_back(sym_poly(poly_sum));
            std::sort(kids.begin(), kids.end(), SymLess{});
            return sym_prod(kids);
        }
    }
    throw std::logic_error("unreachable symbol kind");
}

Degree sym_degree(const SymPtr& t, const DegreeParams& p) {
    switch (t->kind) {
        case SymKind::One: return Degree(Rational(0), 0);
        case SymKind::Noise: return p.alpha;
        case SymKind::Poly: return Degree(Rational(p.scaling.weight(t->k)), 0);
        case SymKind::Int:
            return sym_degree(t->child, p) +
                   Degree(p.beta - Rational(p.scaling.weight(t->k)), 0);
        case SymKind::Prod: {
            Degree d(Rational(0), 0);
            for (const auto& kid : t->kids) d = d + sym_degree(kid, p);
            return d;
        }
    }
    throw std::logic_error("unreachable symbol kind");
}

int param_count(const SymPtr& t) {
    switch (t->kind) {
        case SymKind::One:
        case SymKind::Noise:
        case SymKind::Poly: return 0;
        case SymKind::Int: return 1 + param_count(t->child);
        case SymKind::Prod: {
            int n = 0;
            for (const auto& kid : t->kids) n += param_count(kid);
            return n;
        }
    }
    throw std::logic_error("unreachable symbol kind");
}

int noise_count(const SymPtr& t) {
    switch (t->kind) {
        case SymKind::One:
        case SymKind::Poly: return 0;
        case SymKind::Noise: return 1;
        case SymKind::Int: return noise_count(t->child);
        case SymKind::Prod: {
            int n = 0;
            for (const auto& kid : t->kids) n += noise_count(kid);
            return n;
        }
    }
    throw std::logic_error("unreachable symbol kind");
}

namespace {

void dedup(std::vector<SymPtr>& v) {
    std::sort(v.begin(), v.end(), SymLess{});
    v.erase(std::unique(v.begin(), v.end(),
                        [](const SymPtr& a, const SymPtr& b) { return sym_equal(a, b); }),
            v.end());
}

void dedup_vectors(std::vector<std::vector<int>>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// All multiindices j with |j|_s strictly below `bound`.
std::vector<std::vector<int>> multiindices_below(const Degree& bound, const ScalingSpec& sc) {
    std::vector<std::vector<int>> out;
    if (bound.r.num > 1000000)
        throw std::invalid_argument("monomial enumeration bound too large");
    std::vector<int> j(sc.dim(), 0);
    // recursive enumeration over the (small) simplex
    struct Rec {
        const Degree& bound;
        const ScalingSpec& sc;
        std::vector<std::vector<int>>& out;
        std::vector<int>& j;
        void go(int pos) {
            if (pos == sc.dim()) {
                out.push_back(j);
                return;
            }
            for (int v = 0;; ++v) {
                j[pos] = v;
                long long ww = sc.weight(j);
                if (!(Degree(Rational(ww), 0) < bound)) break;
                go(pos + 1);
            }
            j[pos] = 0;
        }
    } rec{bound, sc, out, j};
    rec.go(0);
    dedup_vectors(out);
    return out;
}

}  // namespace

std::vector<SymPtr> g_set(const SymPtr& t, const DegreeParams& p) {
    std::vector<SymPtr> out;
    switch (t->kind) {
        case SymKind::One:
        case SymKind::Noise: out = {t}; break;
        case SymKind::Poly: {
            // all X^j with j <= k componentwise
            std::vector<int> j(t->k.size(), 0);
            std::vector<SymPtr> acc;
            struct Rec {
                const std::vector<int>& k;
                std::vector<int>& j;
                std::vector<SymPtr>& acc;
                void go(size_t pos) {
                    if (pos == k.size()) {
                        acc.push_back(sym_poly(j));
                        return;
                    }
                    for (int v = 0; v <= k[pos]; ++v) {
                        j[pos] = v;
                        go(pos + 1);
                    }
                    j[pos] = 0;
                }
            } rec{t->k, j, acc};
            rec.go(0);
            out = std::move(acc);
            break;
        }
        case SymKind::Int: {
            for (const auto& s : g_set(t->child, p)) out.push_back(sym_int(t->k, s));
            Degree d = sym_degree(t, p);
            for (const auto& j : multiindices_below(d, p.scaling)) out.push_back(sym_poly(j));
            break;
        }
        case SymKind::Prod: {
            std::vector<SymPtr> acc{sym_one()};
            for (const auto& kid : t->kids) {
                std::vector<SymPtr> next;
                for (const auto& left : acc)
                    for (const auto& s : g_set(kid, p))
                        next.push_back(canon(sym_prod({left, s})));
                dedup(next);
                acc = std::move(next);
            }
            out = std::move(acc);
            break;
        }
    }
    for (auto& s : out) s = canon(s);
    dedup(out);
    return out;
}

std::string sym_format(const SymPtr& t) {
    auto idx = [](const std::vector<int>& k) {
        std::string s = "[";
        for (size_t i = 0; i < k.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(k[i]);
        }
        return s + "]";
    };
    switch (t->kind) {
        case SymKind::One: return "1";
        case SymKind::Noise: return "Xi";
        case SymKind::Poly: return "X" + idx(t->k);
        case SymKind::Int: return "I" + idx(t->k) + "(" + sym_format(t->child) + ")";
        case SymKind::Prod: {
            std::string s = "(";
            for (size_t i = 0; i < t->kids.size(); ++i) {
                if (i) s += "*";
                s += sym_format(t->kids[i]);
            }
            return s + ")";
        }
    }
    throw std::logic_error("unreachable symbol kind");
}

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("symbol parse error at position " + std::to_string(pos) +
                                    ": " + what + " in '" + s + "'");
    }
    char peek() { return pos < s.size() ? s[pos] : '\0'; }
    char get() {
        if (pos >= s.size()) fail("unexpected end of input");
        return s[pos++];
    }
    void expect(char c) {
        if (get() != c) {
            --pos;
            fail(std::string("expected '") + c + "'");
        }
    }
    std::vector<int> index() {
        expect('[');
        std::vector<int> k;
        while (true) {
            size_t start = pos;
            while (isdigit(peek())) ++pos;
            if (pos == start) fail("expected digit");
            k.push_back(std::stoi(s.substr(start, pos - start)));
            char c = get();
            if (c == ']') break;
            if (c != ',') {
                --pos;
                fail("expected ',' or ']'");
            }
        }
        return k;
    }
    SymPtr atom() {
        char c = peek();
        if (c == '1') {
            ++pos;
            return sym_one();
        }
        if (c == 'X') {
            ++pos;
            if (peek() == 'i') {
                ++pos;
                return sym_noise();
            }
            return sym_poly(index());
        }
        if (c == 'I') {
            ++pos;
            auto k = index();
            expect('(');
            SymPtr t = expr();
            expect(')');
            return sym_int(k, t);
        }
        if (c == '(') {
            ++pos;
            SymPtr t = expr();
            expect(')');
            return t;
        }
        fail("expected symbol");
    }
    SymPtr expr() {
        std::vector<SymPtr> factors{atom()};
        while (peek() == '*') {
            ++pos;
            factors.push_back(atom());
        }
        return factors.size() == 1 ? factors[0] : sym_prod(factors);
    }
};

}  // namespace

SymPtr sym_parse(const std::string& str) {
    Parser p{str};
    SymPtr t = p.expr();
    if (p.pos != str.size()) p.fail("trailing input");
    return t;
}

Degree parse_degree(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty degree string");
    // find a 'k' suffix term if present
    size_t kpos = s.rfind('k');
    if (kpos == std::string::npos) return Degree(parse_rational(s), 0);
    if (kpos + 1 != s.size())
        throw std::invalid_argument("cannot parse degree: '" + s + "'");
    // split off the integer multiplying k: scan back to the preceding +/- that
    // is not the leading sign
    std::string body = s.substr(0, kpos);
    size_t split = std::string::npos;
    for (size_t i = body.size(); i-- > 1;) {
        if (body[i] == '+' || body[i] == '-') {
            split = i;
            break;
        }
    }
    auto parse_kcoef = [](std::string t) -> long long {
        if (t.empty() || t == "+") return 1;
        if (t == "-") return -1;
        return std::stoll(t);
    };
    try {
        if (split == std::string::npos) return Degree(Rational(0), parse_kcoef(body));
        std::string rpart = body.substr(0, split);
        std::string kpart = body.substr(split);  // keeps the sign
        return Degree(parse_rational(rpart), parse_kcoef(kpart));
    } catch (const std::logic_error&) {
        throw std::invalid_argument("cannot parse degree: '" + s + "'");
    }
}

}  // namespace qk
