// Renormalisation constants: mollified covariance tables, the kernel-weighted
// integrals C1/C2 (real-space and spectral routes, whole-line and periodic
// kernels), the tabulated counterterm function c -> C1(c)/c consumed by the
// solver, and the modal constants matching the spectral noise of the
// convergence harness.
#pragma once

#include <vector>

#include "quasikit/kernels.h"

namespace qk {

// Covariance family C(t,x) = chi(lambda/r) * lambda^(nu-3) with the parabolic
// distance lambda = sqrt(|t|) + |x| and a quintic smoothstep cutoff chi equal
// to 1 below r/2 and 0 beyond r.  pure_power drops the cutoff (chi == 1),
// giving the exactly self-similar field used by the scaling study.
struct CovarianceSpec {
    double nu = 0.5;
    double r = 0.25;
    bool pure_power = false;
};

// Product bump mollifier rho(t,x) = Z * phi(t) * phi(x) normalized to mass 1,
// scaled parabolically: rho_eps(t,x) = eps^-3 rho(t/eps^2, x/eps).  Two
// admissible axis profiles are provided for the robustness study.
struct MollifierSpec {
    int variant = 0;  // 0: exp(-1/(1-s^2)), 1: exp(-1/(1-s^4))
};

// Unmollified covariance value (infinite at the origin; callers keep off it).
double covariance_exact(const CovarianceSpec& cov, double t, double x);

// Closed-form total mass of the cutoff covariance (throws for pure_power,
// whose mass diverges).
double covariance_mass(const CovarianceSpec& cov);

// Slow adaptive evaluation of (C * rho_eps * rho_eps)(t,x) at a single point,
// refined until two consecutive levels agree to tol, measured against the
// local value plus a small fraction of the central peak scale eps^(nu-3);
// throws with the achieved tolerance on non-convergence.  Serves as the
// independent oracle for the table below.
double covariance_point(const CovarianceSpec& cov, const MollifierSpec& mol,
                        double eps, double t, double x, double tol = 1e-7);

// Uniform-grid table of the doubly mollified covariance on
// [-T_half, T_half] x [-X_half, X_half], covering the support plus the
// mollifier margin.  Row/column spacing resolves the mollification scale
// (dt = eps^2/(16*refine), dx = eps/(16*refine)).
struct CovarianceTable {
    CovarianceSpec cov;
    MollifierSpec mol;
    double eps = 0.0;
    int refine = 1;
    double dt = 0.0, dx = 0.0;
    int n_t = 0, n_x = 0;  // (2*n_t+1) rows x (2*n_x+1) cols, row-major
    std::vector<double> v;

    double at(int i, int j) const {  // i in [-n_t, n_t], j in [-n_x, n_x]
        return v[(size_t)(i + n_t) * (2 * n_x + 1) + (j + n_x)];
    }
    double& at(int i, int j) {
        return v[(size_t)(i + n_t) * (2 * n_x + 1) + (j + n_x)];
    }
    double t_half() const { return n_t * dt; }
    double x_half() const { return n_x * dx; }
    // Cubic (4-point Lagrange) interpolation; zero outside the domain.
    double eval(double t, double x) const;
    // Cubic interpolation between rows at an exact column index.
    double eval_column(double t, int j) const;
    // Grid sum dt*dx*sum(v); equals the integral to spectral accuracy since
    // the table vanishes smoothly at its edges.
    double mass() const;
};

// Builds the table: pointwise covariance fill, separable discrete
// convolution with the sampled mollifier weights, then a per-point graded
// quadrature overwrite of the parabolic neighbourhood of the origin where
// sampled data cannot represent the singularity.
CovarianceTable mollified_covariance(const CovarianceSpec& cov,
                                     const MollifierSpec& mol, double eps,
                                     int refine = 1);

// C1(c) = int K_c(t,x) C_eps(t,x) dx dt over t > 0 by graded product
// quadrature against the table; K_c is the whole-line heat kernel of
// d_t - c d_x^2, or its periodized image sum when periodic_images is set
// (cutoff tables only).
double compute_C1(double c, const CovarianceTable& tab,
                  bool periodic_images = false);

// Spatial cosine transforms Chat(s, kappa) of the table rows, sampled on the
// Gauss-Legendre frequency panels used by the continuous (whole-line) route
// and at the discrete torus frequencies 2*pi*k used by the periodic route.
struct SpectralTable {
    double eps = 0.0;
    double nu = 0.0;
    double ds = 0.0;
    int n_s = 0;                     // rows s_j = j*ds, j = 0..n_s (even)
    std::vector<double> kappa, kw;   // continuous nodes and weights
    std::vector<double> chat;        // kappa.size() x (n_s+1), row-major
    int k_tor = 0;                   // torus modes k = 0..k_tor
    std::vector<double> chat_tor;    // (k_tor+1) x (n_s+1)
};

SpectralTable build_spectral_table(const CovarianceTable& tab);

// C2(c, c_bar) via per-frequency double time integrals: each frequency
// contributes [I(kappa,c) + I(kappa,c_bar)] / (c + c_bar) with
// I(kappa,c) = int_0^inf Chat(s,kappa) exp(-c kappa^2 s) ds.  Symmetric in
// (c, c_bar); for the whole-line kernel c*C2(c,c) equals C1(c) exactly.
double compute_C2(double c, double c_bar, const SpectralTable& st);

// Partial derivative of C2 in its first argument, by differentiating the
// exponential inside I (adds an s-weighted integral); used by the
// derivative-identity check dC1 = C2 + 2c * d1C2.
double compute_C2_partial1(double c, double c_bar, const SpectralTable& st);

// Periodic-kernel constants from the torus mode sums.  periodic_C1 keeps the
// zero mode; periodic_C2 cannot see it (the spatial derivative kills it), so
// periodic_C1 - c*periodic_C2(c,c) equals half the covariance mass exactly.
double periodic_C1(double c, const SpectralTable& st);
double periodic_C2(double c, double c_bar, const SpectralTable& st);

// Tabulated counterterm c -> C1(c)/c on a uniform grid with not-a-knot cubic
// spline interpolation, clamped to the grid range.  Values use the modified
// constant c*C2(c,c) (the model adopted for the solver path), which equals
// C1(c) for the whole-line kernel.
struct CountertermTable {
    std::vector<double> c_nodes;
    std::vector<double> values;
    std::vector<double> m2;  // spline second derivatives at the nodes
    double eval(double c) const;
};

CountertermTable counterterm_function(double eps, const CovarianceSpec& cov,
                                      const MollifierSpec& mol,
                                      const KernelFamily& fam,
                                      const std::vector<double>& c_grid,
                                      int refine = 1);

// Convenience wrappers validating c against the kernel family range.  Each
// call builds the covariance table afresh; batch work should go through the
// table API above.
double compute_C1(double c, double eps, const CovarianceSpec& cov,
                  const MollifierSpec& mol, const KernelFamily& fam);
double compute_C2(double c, double c_bar, double eps, const CovarianceSpec& cov,
                  const MollifierSpec& mol, const KernelFamily& fam);

// Stationary spectral noise density S(omega, k) = (mu^2 + |omega| + k^2)^(-nu/2)
// used by the convergence harness on the space-time torus.
struct NoiseSpectrum {
    double nu = 0.75;
    double mu = 0.5;
};

// Counterterm for the spectral noise above: the torus mode sum of the
// modified constant C2(c,c), with the mollifier entering through its
// squared Fourier transform on each axis.  Exactly identity-consistent by
// construction.  The raw variant adds the zero-mode atom mu^-nu/(2c) that
// the unmodified constant C1/c retains.
double modal_counterterm(double c, double eps, const NoiseSpectrum& ns,
                         const MollifierSpec& mol);
double modal_counterterm_raw(double c, double eps, const NoiseSpectrum& ns,
                             const MollifierSpec& mol);

}  // namespace qk
