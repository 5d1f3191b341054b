// Convergence harness: stationary Gaussian noise synthesized spectrally on a
// space-time torus, mollified renormalised solves coupled across scales, the
// Cauchy-in-eps convergence and mollifier-robustness studies, and CSV/SVG
// report emission.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "quasikit/constants.h"
#include "quasikit/grid.h"
#include "quasikit/qlsolve.h"

namespace qk {

// Centred stationary Gaussian noise on the doubled space-time torus
// [0, 2T) x circle with spectral density S(omega,k) = (mu^2+|omega|+k^2)^(-nu/2).
// The doubled time window keeps the solve interval [0, T] clear of its own
// periodic images.  Each mode draws its complex Gaussian from a counter-based
// generator keyed on (seed, mode index), so fields are reproducible and
// coupled across mollification scales by construction.  Both 2*n_t and n_x
// must be powers of two.  mu = 0 is admitted by dropping the then-singular
// zero mode, which centres every sample exactly.
struct NoiseSpec {
    double nu = 0.75;
    double mu = 0.5;  // spectral floor, >= 0
    std::uint64_t seed = 1;
    GridSpec grid;  // solver grid; the noise lattice is 2*n_t rows, period 2T
};

// Synthesized field on the full noise lattice (2*n_t rows, n_x columns).
Field sample_noise(const NoiseSpec& spec);

// Exact lattice covariance E[xi(t,x+y) xi(t,x)] at spatial lag y = j*dx, by
// direct mode summation; the oracle for the empirical covariance tests.
double noise_covariance_exact(const NoiseSpec& spec, int j);

// Periodic grid convolution with the parabolically scaled product bump
// rho_eps on the full noise lattice (FFT along space, direct along time);
// discrete weights are normalized to unit sum per axis.  Requires
// eps >= 4*dx.
Field mollify_noise(const Field& xi, const GridSpec& grid, double eps,
                    const MollifierSpec& mol);

// Rows 0..n_t of a full-lattice field, as the solver expects.
Field solver_window(const Field& full, const GridSpec& grid);

// Scalar coefficient data for the experiment problem; carries the Taylor
// data the counterterm combo needs plus the range of a for the counterterm
// grid.
struct ProblemSpec {
    std::function<double(double)> a, ap, app;
    std::function<double(double)> F0, F1, F1p;
    std::function<double(double)> u0;
    double a_min = 0.5, a_max = 1.5;
};

// a(x) = 1 + 0.5*(2/pi)*atan(x), F0 = 0.1 cos, F1 = 1 + 0.25 sin,
// u0 = 0.5 sin(2 pi x): strictly inside the positivity and compactness
// hypotheses and resolvable on a desk grid.
ProblemSpec default_problem();

// Counterterm curve c -> modal constant of the spectral noise, tabulated on
// a uniform grid spanning [c_lo, c_hi] with cubic interpolation; `raw`
// switches to the unmodified constant that keeps the zero-mode atom.
std::function<double(double)> counterterm_curve(double eps, const NoiseSpectrum& ns,
                                                const MollifierSpec& mol, double c_lo,
                                                double c_hi, bool raw = false);

struct ExperimentSpec {
    NoiseSpec noise{0.75, 0.5, 1, GridSpec{256, 8192, 0.25}};
    ProblemSpec problem;
    std::vector<double> eps_levels{0.1, 0.05, 0.025};
    int samples = 8;
    bool renormalise = true;
    bool use_fixedpoint = false;  // solve_fd by default
    MollifierSpec mol_a, mol_b;   // mol_b drives rho_comparison
    double t_skip = 0.0;          // norms taken over [t_skip, t0 ^ T]
    std::uint64_t seed0 = 1;      // sample s uses seed0 + s
};

struct SolveReport {
    Field u;  // on the solver window (n_t+1 rows)
    double t0 = 0.0;
    bool truncated = false;   // t0 < T (fixed-point path only)
    int iterations = 0;       // fixed-point sweeps, or time steps marched
    double residual = 0.0;    // final sweep gap, or discrete defect sup
};

// Mollifies a synthesized full-lattice field at eps and solves, subtracting
// the counterterm when the spec requests renormalisation.
SolveReport run_with_field(const ExperimentSpec& spec, const Field& xi_full, double eps,
                           const MollifierSpec& mol, bool raw_constants = false);

// Synthesizes the noise for `seed` and runs with the primary mollifier.
SolveReport run_renormalised(const ExperimentSpec& spec, double eps, std::uint64_t seed);

struct ConvergenceRow {
    int sample = 0;
    double eps = 0.0;  // the coarser scale of the pair
    double D = 0.0;    // sup_{[t_skip, t0]} |u^eps - u^{eps/2}|
    double t0 = 0.0;
};

struct ConvergenceTable {
    std::vector<double> eps_levels;
    std::vector<ConvergenceRow> rows;  // sample-major, levels-1 rows per sample
    std::vector<double> median_D;      // one per adjacent level pair
    std::vector<double> ratio;         // median of per-sample D_{k+1}/D_k
    int surviving = 0;                 // samples whose norm window is nonempty
    bool partial = false;
};

// Coupled Cauchy differences across the dyadic levels, medians over samples.
// Requires >= 3 strictly decreasing levels and >= 8 samples.
ConvergenceTable convergence_study(const ExperimentSpec& spec);

struct RhoRow {
    int sample = 0;
    double eps = 0.0;
    double gap = 0.0;  // sup |u^{eps,A} - u^{eps,B}|
    double t0 = 0.0;
};

struct RhoTable {
    std::vector<double> eps_levels;
    std::vector<RhoRow> rows;
    std::vector<double> median_gap;  // one per level
    std::vector<double> ratio;       // median of per-sample gap_{k+1}/gap_k
};

// Runs the two mollifiers of the spec on the same fields at matching seeds.
RhoTable rho_comparison(const ExperimentSpec& spec, bool raw_constants = false);

// CSV emission (%.17g doubles, byte-stable across reruns).
std::string csv_convergence(const ConvergenceTable& t);
std::string csv_rho(const RhoTable& t);

struct ConstantsRow {
    double eps = 0.0, c = 0.0, cbar = 0.0, C1 = 0.0, C2 = 0.0, identity_residual = 0.0;
};
std::string csv_constants(const std::vector<ConstantsRow>& rows);

// Solution field dump with a "# meta" header carrying t0/iterations/residual.
std::string csv_solve(const GridSpec& g, const Field& u, double t0, int iterations,
                      double residual);

// Static log-log line chart; every data point lands inside the axis box.
std::string svg_loglog(const std::vector<double>& x,
                       const std::vector<std::vector<double>>& series,
                       const std::string& x_label, const std::string& y_label);

// Throws std::runtime_error on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qk
