// Quasilinear solvers on the periodic space-time grid.
//
// Both solvers integrate
//
//   d_t u = a(u) d_x^2 u + F0(u) (d_x u)^2 + F1(u) xi - C(a(u)) * combo(u) + extra
//
// with combo = a F1' F1 + F1^2 F0 - a' F1^2 evaluated at u; the counterterm
// curve C may be absent.  solve_fd is a semi-implicit finite-difference
// scheme (implicit diffusion with the coefficient frozen at the previous
// level, explicit remainder, cyclic tridiagonal solves).  solve_fixedpoint
// iterates the mild formulation built on the parametrized kernel operators:
// the right-hand side is modified by the kernel-derivative integrals
//
//   F^ = (1 - a'(u) V3) 1_{t>0} F + (a a'')(u) |d_x u|^2 V3
//        + (a (a')^2)(u) |d_x u|^2 V2 + 2 (a a')(u) d_x u V1,
//   u  = I(a(u), 1_{t>0} F^) + Ihat(a(u), u0),
//
// where V3/V2/V1 pair the first, second, and mixed kernel derivatives of the
// integral against F^ and u0.  The field g = a'(u) V3 measures how strongly
// the parameter feeds back; t0 reports the largest time up to which
// sup |g| < 1 holds on every earlier slice.
#pragma once

#include <functional>
#include <vector>

#include "quasikit/grid.h"
#include "quasikit/kernels.h"

namespace qk {

struct Problem {
    std::function<double(double)> a, ap, app;
    std::function<double(double)> F0, F1, F1p;
    std::function<double(double)> C;  // counterterm curve c -> C(c); may be empty
};

struct SolveParams {
    KernelFamily family;     // used verbatim when auto_range is false
    bool auto_range = true;  // derive the family range from a(u) with margin
    int n_c = 17;
    int max_sweeps = 40;
    double tol = 1e-9;          // relative sup-norm gap between sweeps
    double g_threshold = 1.0;   // contraction monitor threshold
};

struct SolveResult {
    Field u, F_hat, V1, V2, V3, g;
    std::vector<double> gap_history;
    double t0 = 0.0;
    int t0_index = 0;
    bool converged = false;
    int sweeps = 0;
    KernelFamily family;
};

SolveResult solve_fixedpoint(const GridSpec& g, const Problem& p, const std::vector<double>& u0,
                             const Field& xi, const Field* extra, const SolveParams& params);

Field solve_fd(const GridSpec& g, const Problem& p, const std::vector<double>& u0, const Field& xi,
               const Field* extra);

// Cyclic tridiagonal solve: diag[i] u_i + sub[i] u_{i-1} + sup[i] u_{i+1} =
// rhs[i] with periodic wrap-around indices.
std::vector<double> solve_periodic_tridiag(const std::vector<double>& sub,
                                           const std::vector<double>& diag,
                                           const std::vector<double>& sup,
                                           const std::vector<double>& rhs);

// Row-wise spectral derivatives on the unit circle.
Field deriv_x_spectral(const Field& u);
Field deriv_xx_spectral(const Field& u);

// Sup norm of the strong-form residual (backward time difference, spectral
// space derivatives) over rows >= max(1, t_skip).
double residual_sup(const GridSpec& g, const Problem& p, const Field& u, const Field& xi,
                    const Field* extra, int t_skip);

// Largest time such that every slice up to it keeps sup |g| below threshold.
double monitor_t0(const GridSpec& g, const Field& gfield, double threshold, int* index);

}  // namespace qk
