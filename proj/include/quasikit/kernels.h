// Parametrized periodic heat-kernel operators.
//
// For a diffusivity value c the periodic kernel acts mode-wise as
// exp(-c*khat^2*r) with khat = 2*pi*k.  The operators below evaluate, for a
// space-time forcing f and a pointwise parameter field c(t,x),
//
//   I_{l,kx}(c, f)(t, x) = d_x^kx d_c^l  int_0^t int_T p^c_{t-s}(x-y) f(s, y) dy ds
//
// with the parameter derivative taken before freezing c at the evaluation
// point, i.e. the kernel is d_c^l d_x^kx p^c and c = c(t,x) afterwards.  The
// companion Ihat propagates an initial condition the same way.
//
// Evaluation strategy: the forcing is transformed to Fourier modes row by
// row; per mode the time integral is built by product integration, exact on
// piecewise-linear interpolants over interior slabs while the newest slab
// freezes the left value.  Output row i therefore depends on forcing rows
// 0..i-1 only, and row 0 is zero.  The mode integrals are accumulated
// recursively for every diffusivity node of a KernelFamily, synthesized to
// physical space per node, and interpolated in c by a not-a-knot cubic
// spline over the nodes (C^2 in c, so spatial derivatives of the output stay
// clean where the parameter field crosses node boundaries).
#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "quasikit/grid.h"

namespace qk {

struct KernelFamily {
    double c_min = 0.2;
    double c_max = 5.0;
    int n_c = 17;    // diffusivity nodes (>= 4 for cubic interpolation)
    int images = 12; // Gaussian image truncation for real-space kernel values

    double c_node(int j) const { return c_min + (c_max - c_min) * j / (n_c - 1); }
    double c_step() const { return (c_max - c_min) / (n_c - 1); }
};

// Exponential slab moments P_m = int_0^dt a^m exp(-lam*a) da for m = 0..3,
// evaluated by a series for small lam*dt and a recurrence otherwise.
std::array<double, 4> exponential_moments(double lam, double dt);

// Periodic heat kernel and its diffusivity derivatives (l <= 2) by an
// image-sum over 2*images+1 Gaussian copies.
double heat_kernel(double c, double r, double z, int images);
double dc_heat_kernel(int l, double c, double r, double z, int images);

// Independent evaluation of d_c^l p^c_r(z) through the semigroup identity
// d_c^l p = l! * d_x^{2l} (p convolved with itself l times in space-time):
// kernels are sampled on an n-point grid, convolved spectrally, and the time
// layers are integrated with nested Gauss-Legendre rules of gl_nodes points.
double dc_heat_kernel_conv(int l, double c, double r, double z, int n, int gl_nodes, int images);

// Precomputed per-(node, mode) damping factors and slab moments.
struct KernelTables {
    double c_min = 0, c_max = 0;
    int n_c = 0;
    int n_x = 0;
    double dt = 0;
    std::vector<double> damp;     // n_c * (n_x/2+1)
    std::vector<double> moments;  // n_c * (n_x/2+1) * 4
};

KernelTables build_kernel_tables(const KernelFamily& fam, double dt, int n_x);
void save_kernel_tables(const std::string& path, const KernelTables& t);
KernelTables load_kernel_tables(const std::string& path);

struct MultiField {
    Field I;    // l = 0, kx = 0
    Field I1;   // l = 1, kx = 0
    Field I2;   // l = 2, kx = 0
    Field I1x;  // l = 1, kx = 1
};

// One-pass evaluation of the four operator outputs the quasilinear solver
// consumes.  c and f live on the grid; tables may be null (built on demand).
MultiField apply_I_multi(const GridSpec& g, const KernelFamily& fam, const Field& c,
                         const Field& f, const KernelTables* tables = nullptr);

// Single-output variants.  k_t > 0 is not supported and is rejected.
Field apply_I(const GridSpec& g, const KernelFamily& fam, const Field& c, const Field& f,
              const KernelTables* tables = nullptr);
Field apply_I_deriv(const GridSpec& g, const KernelFamily& fam, const Field& c, const Field& f,
                    int l, int k_t, int k_x, const KernelTables* tables = nullptr);

// Serial reference evaluation: per output row the slab sums are recomputed
// from scratch with closed-form aging instead of the running recursion.
MultiField apply_I_multi_reference(const GridSpec& g, const KernelFamily& fam, const Field& c,
                                   const Field& f);
Field apply_I_reference(const GridSpec& g, const KernelFamily& fam, const Field& c,
                        const Field& f);

// Initial-condition propagator d_x^kx d_c^l exp(c*t*Laplace) u0 with c frozen
// at the evaluation point afterwards.
Field apply_Ihat(const GridSpec& g, const KernelFamily& fam, const Field& c,
                 const std::vector<double>& u0, int l, int k_t, int k_x);

}  // namespace qk
