// Semi-implicit finite-difference solver and the mild-form fixed-point
// solver built on the parametrized kernel operators.
#include "quasikit/qlsolve.h"

#include <cmath>
#include <stdexcept>

#include "quasikit/fft.h"

namespace qk {

namespace {

void thomas(const std::vector<double>& sub, std::vector<double> diag,
            const std::vector<double>& sup, std::vector<double> rhs, std::vector<double>& out) {
    const int n = (int)diag.size();
    for (int i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    out.resize((size_t)n);
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i) out[i] = (rhs[i] - sup[i] * out[i + 1]) / diag[i];
}

double counterterm_value(const Problem& p, double u) {
    if (!p.C) return 0.0;
    const double f1 = p.F1(u);
    const double combo = p.a(u) * p.F1p(u) * f1 + f1 * f1 * p.F0(u) - p.ap(u) * f1 * f1;
    return p.C(p.a(u)) * combo;
}

double sup_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::abs(v));
    return m;
}

KernelFamily family_for_range(double amin, double amax, int n_c) {
    if (!(amin > 0)) throw std::invalid_argument("diffusivity must stay positive");
    const double span = std::max({amax - amin, 0.05 * amax, 1e-3});
    KernelFamily fam;
    fam.c_min = std::max(amin - 0.75 * span, 0.25 * amin);
    fam.c_max = amax + 0.75 * span;
    fam.n_c = n_c;
    return fam;
}

}  // namespace

std::vector<double> solve_periodic_tridiag(const std::vector<double>& sub,
                                           const std::vector<double>& diag,
                                           const std::vector<double>& sup,
                                           const std::vector<double>& rhs) {
    const int n = (int)diag.size();
    if (n < 3 || (int)sub.size() != n || (int)sup.size() != n || (int)rhs.size() != n)
        throw std::invalid_argument("cyclic tridiagonal system needs size >= 3");
    // Sherman-Morrison: strip the wrap-around entries into a rank-one update
    const double alpha = sup[n - 1];  // couples row n-1 to column 0
    const double beta = sub[0];       // couples row 0 to column n-1
    const double gamma = -diag[0];
    std::vector<double> d = diag;
    d[0] = diag[0] - gamma;
    d[n - 1] = diag[n - 1] - alpha * beta / gamma;
    std::vector<double> y, z, uvec((size_t)n, 0.0);
    uvec[0] = gamma;
    uvec[n - 1] = alpha;
    thomas(sub, d, sup, rhs, y);
    thomas(sub, d, sup, uvec, z);
    const double fact =
        (y[0] + beta * y[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    std::vector<double> x((size_t)n);
    for (int i = 0; i < n; ++i) x[i] = y[i] - fact * z[i];
    return x;
}

Field deriv_x_spectral(const Field& u) {
    Field d(u.rows, u.n_x);
    const int n = u.n_x;
    for (int i = 0; i < u.rows; ++i) {
        auto half = rfft(u.row(i), n);
        for (int k = 0; k <= n / 2; ++k) {
            const double khat = 2.0 * M_PI * k;
            half[k] = (k == n / 2) ? std::complex<double>(0.0, 0.0)
                                   : half[k] * std::complex<double>(0.0, khat);
        }
        irfft(half.data(), n, d.row(i));
    }
    return d;
}

Field deriv_xx_spectral(const Field& u) {
    Field d(u.rows, u.n_x);
    const int n = u.n_x;
    for (int i = 0; i < u.rows; ++i) {
        auto half = rfft(u.row(i), n);
        for (int k = 0; k <= n / 2; ++k) {
            const double khat = 2.0 * M_PI * k;
            half[k] *= -khat * khat;
        }
        irfft(half.data(), n, d.row(i));
    }
    return d;
}

Field solve_fd(const GridSpec& g, const Problem& p, const std::vector<double>& u0, const Field& xi,
               const Field* extra) {
    const int n = g.n_x;
    if ((int)u0.size() != n) throw std::invalid_argument("initial condition size mismatch");
    if (xi.rows != g.rows() || xi.n_x != n)
        throw std::invalid_argument("noise field shape mismatch");
    if (extra && (extra->rows != g.rows() || extra->n_x != n))
        throw std::invalid_argument("extra forcing shape mismatch");
    const double dt = g.dt(), dx = g.dx();

    Field u(g.rows(), n);
    for (int x = 0; x < n; ++x) u.at(0, x) = u0[x];

    std::vector<double> sub((size_t)n), diag((size_t)n), sup((size_t)n), rhs((size_t)n);
    for (int i = 1; i <= g.n_t; ++i) {
        const double* prev = u.row(i - 1);
        for (int x = 0; x < n; ++x) {
            const double uu = prev[x];
            const double ux = (prev[(x + 1) % n] - prev[(x + n - 1) % n]) / (2.0 * dx);
            double F = p.F0(uu) * ux * ux + p.F1(uu) * xi.at(i - 1, x) - counterterm_value(p, uu);
            if (extra) F += extra->at(i - 1, x);
            const double r = dt * p.a(uu) / (dx * dx);
            sub[x] = -r;
            sup[x] = -r;
            diag[x] = 1.0 + 2.0 * r;
            rhs[x] = uu + dt * F;
        }
        auto next = solve_periodic_tridiag(sub, diag, sup, rhs);
        for (int x = 0; x < n; ++x) u.at(i, x) = next[x];
    }
    return u;
}

double monitor_t0(const GridSpec& g, const Field& gfield, double threshold, int* index) {
    int last = -1;
    for (int i = 0; i <= g.n_t; ++i) {
        double m = 0.0;
        for (int x = 0; x < gfield.n_x; ++x) m = std::max(m, std::abs(gfield.at(i, x)));
        if (m >= threshold) break;
        last = i;
    }
    if (last < 0) last = 0;  // degenerate: already broken at t = 0
    if (index) *index = last;
    return g.time(last);
}

double residual_sup(const GridSpec& g, const Problem& p, const Field& u, const Field& xi,
                    const Field* extra, int t_skip) {
    const Field ux = deriv_x_spectral(u);
    const Field uxx = deriv_xx_spectral(u);
    const double dt = g.dt();
    double m = 0.0;
    for (int i = std::max(1, t_skip); i <= g.n_t; ++i)
        for (int x = 0; x < g.n_x; ++x) {
            const double uu = u.at(i, x);
            double F = p.F0(uu) * ux.at(i, x) * ux.at(i, x) + p.F1(uu) * xi.at(i, x) -
                       counterterm_value(p, uu);
            if (extra) F += extra->at(i, x);
            const double r =
                (u.at(i, x) - u.at(i - 1, x)) / dt - p.a(uu) * uxx.at(i, x) - F;
            m = std::max(m, std::abs(r));
        }
    return m;
}

SolveResult solve_fixedpoint(const GridSpec& g, const Problem& p, const std::vector<double>& u0,
                             const Field& xi, const Field* extra, const SolveParams& params) {
    const int n = g.n_x;
    if ((int)u0.size() != n) throw std::invalid_argument("initial condition size mismatch");
    if (xi.rows != g.rows() || xi.n_x != n)
        throw std::invalid_argument("noise field shape mismatch");
    if (extra && (extra->rows != g.rows() || extra->n_x != n))
        throw std::invalid_argument("extra forcing shape mismatch");

    SolveResult res;
    res.u = Field(g.rows(), n);
    for (int i = 0; i <= g.n_t; ++i)
        for (int x = 0; x < n; ++x) res.u.at(i, x) = u0[x];
    res.F_hat = Field(g.rows(), n);

    Field cfield(g.rows(), n);
    auto eval_c = [&](double& amin, double& amax) {
        amin = 1e300;
        amax = -1e300;
        for (int i = 0; i <= g.n_t; ++i)
            for (int x = 0; x < n; ++x) {
                const double av = p.a(res.u.at(i, x));
                cfield.at(i, x) = av;
                amin = std::min(amin, av);
                amax = std::max(amax, av);
            }
    };

    double amin, amax;
    eval_c(amin, amax);
    KernelFamily fam = params.family;
    if (params.auto_range) fam = family_for_range(amin, amax, params.n_c);
    KernelTables tables = build_kernel_tables(fam, g.dt(), n);
    int rebuilds = 0;

    auto compute_V = [&](MultiField& mv) {
        mv = apply_I_multi(g, fam, cfield, res.F_hat, &tables);
        res.V3 = apply_Ihat(g, fam, cfield, u0, 1, 0, 0);
        res.V2 = apply_Ihat(g, fam, cfield, u0, 2, 0, 0);
        res.V1 = apply_Ihat(g, fam, cfield, u0, 1, 0, 1);
        for (size_t q = 0; q < res.V3.v.size(); ++q) {
            res.V3.v[q] += mv.I1.v[q];
            res.V2.v[q] += mv.I2.v[q];
            res.V1.v[q] += mv.I1x.v[q];
        }
    };

    bool done = false;
    for (int sweep = 1; sweep <= params.max_sweeps && !done; ++sweep) {
        eval_c(amin, amax);
        if (params.auto_range && (amin < fam.c_min || amax > fam.c_max)) {
            if (++rebuilds > 5)
                throw std::domain_error("diffusivity repeatedly escaped the kernel family");
            fam = family_for_range(std::min(amin, fam.c_min), std::max(amax, fam.c_max),
                                   params.n_c);
            tables = build_kernel_tables(fam, g.dt(), n);
        }

        MultiField mv;
        compute_V(mv);
        const Field du = deriv_x_spectral(res.u);

        // Row 0 carries the limit value of the forcing from above: the
        // history integral sees it as the left endpoint of its first slab,
        // and dropping it would cost first-order accuracy near t = 0.  The
        // correction fields all vanish there, so row 0 is the bare forcing.
        Field fnew(g.rows(), n);
        for (int i = 0; i <= g.n_t; ++i)
            for (int x = 0; x < n; ++x) {
                const double uu = res.u.at(i, x);
                const double dux = du.at(i, x);
                const double av = p.a(uu), apv = p.ap(uu), appv = p.app(uu);
                double F = p.F0(uu) * dux * dux + p.F1(uu) * xi.at(i, x) -
                           counterterm_value(p, uu);
                if (extra) F += extra->at(i, x);
                fnew.at(i, x) = (1.0 - apv * res.V3.at(i, x)) * F +
                                av * appv * dux * dux * res.V3.at(i, x) +
                                av * apv * apv * dux * dux * res.V2.at(i, x) +
                                2.0 * av * apv * dux * res.V1.at(i, x);
            }

        Field unew = apply_I(g, fam, cfield, fnew, &tables);
        Field hat0 = apply_Ihat(g, fam, cfield, u0, 0, 0, 0);
        for (size_t q = 0; q < unew.v.size(); ++q) unew.v[q] += hat0.v[q];

        double gap = 0.0;
        for (size_t q = 0; q < unew.v.size(); ++q)
            gap = std::max(gap, std::abs(unew.v[q] - res.u.v[q]));
        gap /= 1.0 + sup_abs(res.u);
        res.gap_history.push_back(gap);
        res.u = std::move(unew);
        res.F_hat = std::move(fnew);
        res.sweeps = sweep;
        if (gap < params.tol) {
            res.converged = true;
            done = true;
        }
    }

    // refresh the auxiliary fields so they correspond to the returned state
    eval_c(amin, amax);
    MultiField mv;
    compute_V(mv);
    res.g = Field(g.rows(), n);
    for (int i = 0; i <= g.n_t; ++i)
        for (int x = 0; x < n; ++x)
            res.g.at(i, x) = p.ap(res.u.at(i, x)) * res.V3.at(i, x);
    res.t0 = monitor_t0(g, res.g, params.g_threshold, &res.t0_index);
    res.family = fam;
    return res;
}

}  // namespace qk
