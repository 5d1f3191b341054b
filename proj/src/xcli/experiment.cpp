// Renormalised convergence experiments: mollified solves coupled through a
// shared synthesized field, counterterm curves tabulated from the modal
// constants, and median-aggregated Cauchy differences across dyadic scales.
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "quasikit/xcli.h"

namespace qk {

namespace {

double cubic4(double fm1, double f0, double f1, double f2, double s) {
    const double lm1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double l0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double l1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double l2 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return fm1 * lm1 + f0 * l0 + f1 * l1 + f2 * l2;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n == 0) return 0.0;
    return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// sup |a - b| over rows i0..i1 inclusive
double window_gap(const Field& a, const Field& b, int i0, int i1) {
    double m = 0.0;
    for (int i = i0; i <= i1; ++i)
        for (int j = 0; j < a.n_x; ++j)
            m = std::max(m, std::fabs(a.at(i, j) - b.at(i, j)));
    return m;
}

// A curve costs 17 modal sums plus a spectral table build, and every sample
// of a study asks for the same few curves; memoize the node values.
const std::vector<double>& curve_nodes(double eps, const NoiseSpectrum& ns,
                                       const MollifierSpec& mol, double c_lo,
                                       double c_hi, bool raw, int n) {
    using Key = std::array<long long, 7>;
    static std::map<Key, std::vector<double>> cache;
    static std::mutex mtx;
    const Key key{std::llround(eps * 1e9), std::llround(ns.nu * 1e9),
                  std::llround(ns.mu * 1e9), mol.variant,
                  std::llround(c_lo * 1e9), std::llround(c_hi * 1e9), raw ? 1 : 0};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> vals(n);
    const double h = (c_hi - c_lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double c = c_lo + h * i;
        vals[i] = raw ? modal_counterterm_raw(c, eps, ns, mol)
                      : modal_counterterm(c, eps, ns, mol);
    }
    return cache.emplace(key, std::move(vals)).first->second;
}

void validate_levels(const ExperimentSpec& spec) {
    if (spec.eps_levels.size() < 3)
        throw std::invalid_argument("convergence study needs at least 3 scales");
    for (size_t k = 1; k < spec.eps_levels.size(); ++k)
        if (!(spec.eps_levels[k] < spec.eps_levels[k - 1]))
            throw std::invalid_argument("scales must be strictly decreasing");
    for (double e : spec.eps_levels)
        if (e < 4.0 * spec.noise.grid.dx())
            throw std::invalid_argument("scale not resolvable on the grid");
    if (spec.samples < 8) throw std::invalid_argument("study needs at least 8 samples");
}

}  // namespace

ProblemSpec default_problem() {
    ProblemSpec ps;
    ps.a = [](double x) { return 1.0 + 0.5 * (2.0 / M_PI) * std::atan(x); };
    ps.ap = [](double x) { return (1.0 / M_PI) / (1.0 + x * x); };
    ps.app = [](double x) {
        const double d = 1.0 + x * x;
        return -(2.0 / M_PI) * x / (d * d);
    };
    ps.F0 = [](double x) { return 0.1 * std::cos(x); };
    ps.F1 = [](double x) { return 1.0 + 0.25 * std::sin(x); };
    ps.F1p = [](double x) { return 0.25 * std::cos(x); };
    ps.u0 = [](double x) { return 0.5 * std::sin(2.0 * M_PI * x); };
    return ps;
}

std::function<double(double)> counterterm_curve(double eps, const NoiseSpectrum& ns,
                                                const MollifierSpec& mol, double c_lo,
                                                double c_hi, bool raw) {
    if (!(c_lo > 0.0) || !(c_hi > c_lo))
        throw std::invalid_argument("counterterm range must be positive and ordered");
    const int n = 17;
    const double h = (c_hi - c_lo) / (n - 1);
    const std::vector<double> vals = curve_nodes(eps, ns, mol, c_lo, c_hi, raw, n);
    return [vals, c_lo, h, n](double c) {
        const double u = std::min(std::max((c - c_lo) / h, 0.0), (double)(n - 1));
        const int i = std::min(std::max((int)std::floor(u), 1), n - 3);
        return cubic4(vals[i - 1], vals[i], vals[i + 1], vals[i + 2], u - i);
    };
}

SolveReport run_with_field(const ExperimentSpec& spec, const Field& xi_full, double eps,
                           const MollifierSpec& mol, bool raw_constants) {
    const GridSpec& g = spec.noise.grid;
    const Field xi = solver_window(mollify_noise(xi_full, g, eps, mol), g);

    Problem p;
    p.a = spec.problem.a;
    p.ap = spec.problem.ap;
    p.app = spec.problem.app;
    p.F0 = spec.problem.F0;
    p.F1 = spec.problem.F1;
    p.F1p = spec.problem.F1p;
    if (spec.renormalise) {
        const double span = spec.problem.a_max - spec.problem.a_min;
        const double margin = std::max(0.05 * span, 1e-3);
        NoiseSpectrum ns;
        ns.nu = spec.noise.nu;
        ns.mu = spec.noise.mu;
        p.C = counterterm_curve(eps, ns, mol, spec.problem.a_min - margin,
                                spec.problem.a_max + margin, raw_constants);
    }

    std::vector<double> u0(g.n_x);
    for (int j = 0; j < g.n_x; ++j) u0[j] = spec.problem.u0(j * g.dx());

    SolveReport rep;
    if (spec.use_fixedpoint) {
        SolveParams params;
        SolveResult res = solve_fixedpoint(g, p, u0, xi, nullptr, params);
        rep.u = std::move(res.u);
        rep.t0 = res.t0;
        rep.truncated = res.t0_index < g.n_t;
        rep.iterations = res.sweeps;
        rep.residual = res.gap_history.empty() ? 0.0 : res.gap_history.back();
    } else {
        rep.u = solve_fd(g, p, u0, xi, nullptr);
        rep.t0 = g.T;
        rep.iterations = g.n_t;
        rep.residual = residual_sup(g, p, rep.u, xi, nullptr, 4);
    }
    return rep;
}

SolveReport run_renormalised(const ExperimentSpec& spec, double eps, std::uint64_t seed) {
    NoiseSpec ns = spec.noise;
    ns.seed = seed;
    return run_with_field(spec, sample_noise(ns), eps, spec.mol_a);
}

ConvergenceTable convergence_study(const ExperimentSpec& spec) {
    validate_levels(spec);
    const GridSpec& g = spec.noise.grid;
    const int K = (int)spec.eps_levels.size();
    ConvergenceTable table;
    table.eps_levels = spec.eps_levels;
    table.rows.resize((size_t)spec.samples * (K - 1));

#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < spec.samples; ++s) {
        NoiseSpec ns = spec.noise;
        ns.seed = spec.seed0 + (std::uint64_t)s;
        const Field xi = sample_noise(ns);
        std::vector<SolveReport> reps(K);
        for (int k = 0; k < K; ++k)
            reps[k] = run_with_field(spec, xi, spec.eps_levels[k], spec.mol_a);
        for (int k = 0; k + 1 < K; ++k) {
            const double t_end = std::min(std::min(reps[k].t0, reps[k + 1].t0), g.T);
            const int i0 = std::max(1, (int)std::ceil(spec.t_skip / g.dt() - 1e-12));
            const int i1 = std::min(g.n_t, (int)std::floor(t_end / g.dt() + 1e-12));
            ConvergenceRow row;
            row.sample = s;
            row.eps = spec.eps_levels[k];
            row.t0 = t_end;
            row.D = (i1 >= i0) ? window_gap(reps[k].u, reps[k + 1].u, i0, i1) : 0.0;
            table.rows[(size_t)s * (K - 1) + k] = row;
        }
    }

    table.surviving = 0;
    for (int s = 0; s < spec.samples; ++s) {
        bool alive = true;
        for (int k = 0; k + 1 < K; ++k)
            if (table.rows[(size_t)s * (K - 1) + k].D <= 0.0) alive = false;
        if (alive) ++table.surviving;
    }
    table.partial = table.surviving < spec.samples;

    for (int k = 0; k + 1 < K; ++k) {
        std::vector<double> ds(spec.samples);
        for (int s = 0; s < spec.samples; ++s)
            ds[s] = table.rows[(size_t)s * (K - 1) + k].D;
        table.median_D.push_back(median_of(ds));
    }
    for (int k = 0; k + 2 < K; ++k) {
        std::vector<double> rs;
        for (int s = 0; s < spec.samples; ++s) {
            const double a = table.rows[(size_t)s * (K - 1) + k].D;
            const double b = table.rows[(size_t)s * (K - 1) + k + 1].D;
            if (a > 0.0) rs.push_back(b / a);
        }
        table.ratio.push_back(median_of(rs));
    }
    return table;
}

RhoTable rho_comparison(const ExperimentSpec& spec, bool raw_constants) {
    validate_levels(spec);
    const GridSpec& g = spec.noise.grid;
    const int K = (int)spec.eps_levels.size();
    RhoTable table;
    table.eps_levels = spec.eps_levels;
    table.rows.resize((size_t)spec.samples * K);

#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < spec.samples; ++s) {
        NoiseSpec ns = spec.noise;
        ns.seed = spec.seed0 + (std::uint64_t)s;
        const Field xi = sample_noise(ns);
        for (int k = 0; k < K; ++k) {
            const SolveReport ra =
                run_with_field(spec, xi, spec.eps_levels[k], spec.mol_a, raw_constants);
            const SolveReport rb =
                run_with_field(spec, xi, spec.eps_levels[k], spec.mol_b, raw_constants);
            const double t_end = std::min(std::min(ra.t0, rb.t0), g.T);
            const int i0 = std::max(1, (int)std::ceil(spec.t_skip / g.dt() - 1e-12));
            const int i1 = std::min(g.n_t, (int)std::floor(t_end / g.dt() + 1e-12));
            RhoRow row;
            row.sample = s;
            row.eps = spec.eps_levels[k];
            row.t0 = t_end;
            row.gap = (i1 >= i0) ? window_gap(ra.u, rb.u, i0, i1) : 0.0;
            table.rows[(size_t)s * K + k] = row;
        }
    }

    for (int k = 0; k < K; ++k) {
        std::vector<double> gs(spec.samples);
        for (int s = 0; s < spec.samples; ++s) gs[s] = table.rows[(size_t)s * K + k].gap;
        table.median_gap.push_back(median_of(gs));
    }
    for (int k = 0; k + 1 < K; ++k) {
        std::vector<double> rs;
        for (int s = 0; s < spec.samples; ++s) {
            const double a = table.rows[(size_t)s * K + k].gap;
            const double b = table.rows[(size_t)s * K + k + 1].gap;
            if (a > 0.0) rs.push_back(b / a);
        }
        table.ratio.push_back(median_of(rs));
    }
    return table;
}

}  // namespace qk
