// Parametrized heat-kernel operators: image-sum kernel values, exponential
// slab moments, the recursive product-integration engine with per-node
// accumulators, the quadratic-cost reference evaluation, and the table cache.
#include "quasikit/kernels.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "quasikit/fft.h"
#include "quasikit/quadrature.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qk {

std::array<double, 4> exponential_moments(double lam, double dt) {
    if (dt <= 0) throw std::invalid_argument("slab width must be positive");
    if (lam < 0) throw std::invalid_argument("decay rate must be nonnegative");
    std::array<double, 4> P{};
    const double x = lam * dt;
    if (x < 0.5) {
        // series in -x avoids the cancellation the recurrence suffers here
        double dpow = dt;
        for (int m = 0; m < 4; ++m) {
            double term = 1.0, sum = 1.0 / (m + 1);
            for (int j = 1; j < 40; ++j) {
                term *= -x / j;
                const double add = term / (m + j + 1);
                sum += add;
                if (std::abs(add) < 1e-18 * std::abs(sum)) break;
            }
            P[m] = dpow * sum;
            dpow *= dt;
        }
    } else {
        const double e = std::exp(-x);
        P[0] = (1.0 - e) / lam;
        double dpow = dt;
        for (int m = 1; m < 4; ++m) {
            P[m] = (m * P[m - 1] - dpow * e) / lam;
            dpow *= dt;
        }
    }
    return P;
}

// ---------------------------------------------------------------------------
// Real-space kernel values.
// ---------------------------------------------------------------------------

static void check_kernel_args(double c, double r) {
    if (c <= 0) throw std::domain_error("diffusivity must be positive");
    if (r <= 0) throw std::domain_error("kernel time must be positive");
}

double heat_kernel(double c, double r, double z, int images) {
    check_kernel_args(c, r);
    z -= std::round(z);
    const double norm = 1.0 / std::sqrt(4.0 * M_PI * c * r);
    double sum = 0.0;
    for (int m = -images; m <= images; ++m) {
        const double w = z + m;
        sum += std::exp(-w * w / (4.0 * c * r));
    }
    return norm * sum;
}

double dc_heat_kernel(int l, double c, double r, double z, int images) {
    check_kernel_args(c, r);
    if (l < 0 || l > 2) throw std::invalid_argument("kernel parameter derivative order must be 0..2");
    z -= std::round(z);
    const double norm = 1.0 / std::sqrt(4.0 * M_PI * c * r);
    double sum = 0.0;
    for (int m = -images; m <= images; ++m) {
        const double w = z + m;
        const double g = std::exp(-w * w / (4.0 * c * r));
        if (l == 0) {
            sum += g;
        } else {
            // logarithmic derivative of the Gaussian image in c
            const double g1 = -0.5 / c + w * w / (4.0 * c * c * r);
            if (l == 1) {
                sum += g * g1;
            } else {
                const double g1p = 0.5 / (c * c) - w * w / (2.0 * c * c * c * r);
                sum += g * (g1 * g1 + g1p);
            }
        }
    }
    return norm * sum;
}

// ---------------------------------------------------------------------------
// Semigroup-identity route for the parameter derivatives (test oracle).
// ---------------------------------------------------------------------------

namespace {

// normalized half-spectrum of the kernel sampled on an n-point grid
std::vector<std::complex<double>> sampled_kernel_modes(double c, double s, int n, int images) {
    std::vector<double> vals((size_t)n);
    for (int j = 0; j < n; ++j) vals[j] = heat_kernel(c, s, (double)j / n, images);
    auto half = rfft(vals.data(), n);
    for (auto& z : half) z /= (double)n;
    return half;
}

}  // namespace

double dc_heat_kernel_conv(int l, double c, double r, double z, int n, int gl_nodes, int images) {
    check_kernel_args(c, r);
    if (l < 1 || l > 2) throw std::invalid_argument("convolution route covers orders 1 and 2");
    std::vector<double> gx, gw;
    gauss_legendre(gl_nodes, gx, gw);

    const int n_half = n / 2 + 1;
    std::vector<std::complex<double>> acc((size_t)n_half, 0.0);
    for (int a = 0; a < gl_nodes; ++a) {
        const double s = r * gx[a];
        auto left = sampled_kernel_modes(c, r - s, n, images);
        std::vector<std::complex<double>> inner;
        if (l == 1) {
            inner = sampled_kernel_modes(c, s, n, images);
        } else {
            // two-fold self-convolution at time s, integrated over the split
            inner.assign((size_t)n_half, 0.0);
            for (int b = 0; b < gl_nodes; ++b) {
                const double sig = s * gx[b];
                auto f1 = sampled_kernel_modes(c, s - sig, n, images);
                auto f2 = sampled_kernel_modes(c, sig, n, images);
                for (int k = 0; k < n_half; ++k) inner[k] += s * gw[b] * f1[k] * f2[k];
            }
        }
        for (int k = 0; k < n_half; ++k) acc[k] += r * gw[a] * left[k] * inner[k];
    }

    double fact = 1.0;
    for (int j = 2; j <= l; ++j) fact *= j;
    double out = 0.0;
    for (int k = 0; k < n_half; ++k) {
        const double khat = 2.0 * M_PI * k;
        double sym = fact;  // l! * (d_x^2)^l acting mode-wise
        for (int j = 0; j < l; ++j) sym *= -khat * khat;
        const std::complex<double> mk = sym * acc[k];
        const std::complex<double> ph(std::cos(khat * z), std::sin(khat * z));
        out += (k == 0 || k == n / 2) ? (mk * ph).real() : 2.0 * (mk * ph).real();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tables.
// ---------------------------------------------------------------------------

KernelTables build_kernel_tables(const KernelFamily& fam, double dt, int n_x) {
    if (fam.n_c < 4) throw std::invalid_argument("kernel family needs at least 4 nodes");
    if (fam.c_min <= 0 || fam.c_max <= fam.c_min)
        throw std::invalid_argument("kernel family range must satisfy 0 < c_min < c_max");
    const int n_half = n_x / 2 + 1;
    KernelTables t;
    t.c_min = fam.c_min;
    t.c_max = fam.c_max;
    t.n_c = fam.n_c;
    t.n_x = n_x;
    t.dt = dt;
    t.damp.resize((size_t)fam.n_c * n_half);
    t.moments.resize((size_t)fam.n_c * n_half * 4);
    for (int j = 0; j < fam.n_c; ++j) {
        const double cj = fam.c_node(j);
        for (int k = 0; k < n_half; ++k) {
            const double khat = 2.0 * M_PI * k;
            const double lam = cj * khat * khat;
            t.damp[(size_t)j * n_half + k] = std::exp(-lam * dt);
            const auto P = exponential_moments(lam, dt);
            for (int m = 0; m < 4; ++m) t.moments[((size_t)j * n_half + k) * 4 + m] = P[m];
        }
    }
    return t;
}

// Cache layout (little-endian hosts): magic "QKKT", u32 version, u32 n_c,
// u32 n_x, f64 c_min, f64 c_max, f64 dt, damp array, moment array.
void save_kernel_tables(const std::string& path, const KernelTables& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open kernel table file for writing: " + path);
    const char magic[4] = {'Q', 'K', 'K', 'T'};
    const uint32_t version = 1, n_c = (uint32_t)t.n_c, n_x = (uint32_t)t.n_x;
    f.write(magic, 4);
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&n_c), 4);
    f.write(reinterpret_cast<const char*>(&n_x), 4);
    f.write(reinterpret_cast<const char*>(&t.c_min), 8);
    f.write(reinterpret_cast<const char*>(&t.c_max), 8);
    f.write(reinterpret_cast<const char*>(&t.dt), 8);
    f.write(reinterpret_cast<const char*>(t.damp.data()), (std::streamsize)(t.damp.size() * 8));
    f.write(reinterpret_cast<const char*>(t.moments.data()),
            (std::streamsize)(t.moments.size() * 8));
    if (!f) throw std::runtime_error("short write on kernel table file: " + path);
}

KernelTables load_kernel_tables(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open kernel table file: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "QKKT", 4) != 0)
        throw std::runtime_error("not a kernel table file: " + path);
    uint32_t version = 0, n_c = 0, n_x = 0;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&n_c), 4);
    f.read(reinterpret_cast<char*>(&n_x), 4);
    if (!f || version != 1) throw std::runtime_error("unsupported kernel table version");
    KernelTables t;
    t.n_c = (int)n_c;
    t.n_x = (int)n_x;
    f.read(reinterpret_cast<char*>(&t.c_min), 8);
    f.read(reinterpret_cast<char*>(&t.c_max), 8);
    f.read(reinterpret_cast<char*>(&t.dt), 8);
    if (n_c < 4 || n_x < 2 || n_x > (1u << 26))
        throw std::runtime_error("corrupt kernel table header");
    const size_t n_half = n_x / 2 + 1;
    t.damp.resize((size_t)n_c * n_half);
    t.moments.resize((size_t)n_c * n_half * 4);
    f.read(reinterpret_cast<char*>(t.damp.data()), (std::streamsize)(t.damp.size() * 8));
    f.read(reinterpret_cast<char*>(t.moments.data()), (std::streamsize)(t.moments.size() * 8));
    if (!f) throw std::runtime_error("truncated kernel table file: " + path);
    return t;
}

// ---------------------------------------------------------------------------
// Interpolation plan over the diffusivity nodes.
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxNodes = 128;

struct InterpPlan {
    std::vector<int> q;        // spline interval index per column
    std::vector<double> theta; // position inside the interval, node units
};

InterpPlan plan_interp(const KernelFamily& fam, const double* crow, int n_x) {
    InterpPlan p;
    p.q.resize((size_t)n_x);
    p.theta.resize((size_t)n_x);
    const double h = fam.c_step();
    const double tol = 1e-12 * (1.0 + std::abs(fam.c_max));
    for (int x = 0; x < n_x; ++x) {
        const double cv = crow[x];
        if (!(cv >= fam.c_min - tol && cv <= fam.c_max + tol))
            throw std::domain_error("parameter value " + std::to_string(cv) +
                                    " outside kernel family range [" + std::to_string(fam.c_min) +
                                    ", " + std::to_string(fam.c_max) + "]");
        const double s = (cv - fam.c_min) / h;
        int q = (int)std::floor(s);
        if (q < 0) q = 0;
        if (q > fam.n_c - 2) q = fam.n_c - 2;
        p.q[x] = q;
        p.theta[x] = s - q;
    }
    return p;
}

// second derivatives (node units) of the not-a-knot cubic spline through y
void spline_moments(const double* y, int n, double* M, double* scratch) {
    M[1] = y[0] - 2 * y[1] + y[2];
    M[n - 2] = y[n - 3] - 2 * y[n - 2] + y[n - 1];
    const int m = n - 4;  // interior unknowns M_2 .. M_{n-3}
    if (m > 0) {
        double* d = scratch;
        double* rhs = scratch + n;
        for (int i = 0; i < m; ++i) {
            const int j = 2 + i;
            rhs[i] = 6.0 * (y[j - 1] - 2 * y[j] + y[j + 1]);
        }
        rhs[0] -= M[1];
        rhs[m - 1] -= M[n - 2];
        d[0] = 4.0;
        for (int i = 1; i < m; ++i) {
            const double w = 1.0 / d[i - 1];
            d[i] = 4.0 - w;
            rhs[i] -= w * rhs[i - 1];
        }
        M[2 + m - 1] = rhs[m - 1] / d[m - 1];
        for (int i = m - 2; i >= 0; --i) M[2 + i] = (rhs[i] - M[2 + i + 1]) / d[i];
    }
    M[0] = 2 * M[1] - M[2];
    M[n - 1] = 2 * M[n - 2] - M[n - 3];
}

double spline_value(const double* y, const double* M, int q, double th) {
    const double om = 1.0 - th;
    return om * y[q] + th * y[q + 1] +
           ((om * om * om - om) * M[q] + (th * th * th - th) * M[q + 1]) / 6.0;
}

// interpolate node-major data buf[(j*n_out+o)*n_x + x] onto the output row
void interp_row(const InterpPlan& plan, const double* buf, int n_c, int n_out, int o, int n_x,
                double* outrow) {
    double y[kMaxNodes], M[kMaxNodes], scratch[2 * kMaxNodes];
    for (int x = 0; x < n_x; ++x) {
        for (int j = 0; j < n_c; ++j) y[j] = buf[((size_t)j * n_out + o) * n_x + x];
        spline_moments(y, n_c, M, scratch);
        outrow[x] = spline_value(y, M, plan.q[x], plan.theta[x]);
    }
}

// mode multiplier (i*khat)^kx * (-khat^2)^l; odd spatial derivatives kill the
// Nyquist mode to keep the synthesis real
std::complex<double> mode_symbol(int l, int kx, int k, int n_x) {
    const double khat = 2.0 * M_PI * k;
    double re = 1.0;
    for (int j = 0; j < l; ++j) re *= -khat * khat;
    if (kx == 0) return {re, 0.0};
    if (k == n_x / 2) return {0.0, 0.0};
    return {0.0, re * khat};
}

void check_engine_inputs(const GridSpec& g, const KernelFamily& fam, const Field& c,
                         const Field& f, const KernelTables* tables) {
    if ((g.n_x & (g.n_x - 1)) != 0) throw std::invalid_argument("n_x must be a power of two");
    if (c.rows != g.rows() || c.n_x != g.n_x || f.rows != g.rows() || f.n_x != g.n_x)
        throw std::invalid_argument("field shape does not match the grid");
    if (fam.n_c < 4 || fam.n_c > kMaxNodes)
        throw std::invalid_argument("kernel family needs between 4 and 128 nodes");
    if (tables) {
        const bool ok = tables->n_c == fam.n_c && tables->n_x == g.n_x &&
                        std::abs(tables->c_min - fam.c_min) <= 1e-12 &&
                        std::abs(tables->c_max - fam.c_max) <= 1e-12 &&
                        std::abs(tables->dt - g.dt()) <= 1e-12 * g.dt();
        if (!ok) throw std::invalid_argument("kernel tables do not match the grid and family");
    }
}

std::vector<Field> run_engine(const GridSpec& g, const KernelFamily& fam, const Field& c,
                              const Field& f, const std::vector<std::pair<int, int>>& outs,
                              const KernelTables* tables) {
    check_engine_inputs(g, fam, c, f, tables);
    KernelTables local;
    if (!tables) {
        local = build_kernel_tables(fam, g.dt(), g.n_x);
        tables = &local;
    }
    const int n_x = g.n_x, n_half = n_x / 2 + 1, n_c = fam.n_c;
    const int n_out = (int)outs.size();
    const double dt = g.dt();

    std::vector<Field> result;
    result.reserve((size_t)n_out);
    for (int o = 0; o < n_out; ++o) result.emplace_back(g.rows(), n_x);

    // accumulators R_l per (node, mode): integral of a^l exp(-lam a) f over
    // all completed interior slabs, aged to the current row
    std::vector<std::complex<double>> R((size_t)n_c * n_half * 3, 0.0);
    std::vector<double> buf((size_t)n_c * n_out * n_x);
    auto fhat_prev = rfft(f.row(0), n_x);
    std::vector<std::complex<double>> fhat_cur;

    for (int i = 1; i <= g.n_t; ++i) {
        const InterpPlan plan = plan_interp(fam, c.row(i), n_x);

        // age accumulators by one slab and synthesize the requested outputs
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int j = 0; j < n_c; ++j) {
            std::complex<double>* Rj = &R[(size_t)j * n_half * 3];
            const double* dampj = &tables->damp[(size_t)j * n_half];
            for (int k = 0; k < n_half; ++k) {
                std::complex<double>* Rk = Rj + (size_t)k * 3;
                const double d = dampj[k];
                const std::complex<double> r0 = Rk[0], r1 = Rk[1], r2 = Rk[2];
                Rk[0] = d * r0;
                Rk[1] = d * (r1 + dt * r0);
                Rk[2] = d * (r2 + 2.0 * dt * r1 + dt * dt * r0);
            }
            std::vector<std::complex<double>> spec((size_t)n_half);
            for (int o = 0; o < n_out; ++o) {
                const int l = outs[o].first, kx = outs[o].second;
                const double* Pj = &tables->moments[(size_t)j * n_half * 4];
                for (int k = 0; k < n_half; ++k) {
                    const std::complex<double> A =
                        Rj[(size_t)k * 3 + l] + fhat_prev[k] * Pj[(size_t)k * 4 + l];
                    spec[k] = mode_symbol(l, kx, k, n_x) * A;
                }
                irfft(spec.data(), n_x, &buf[((size_t)j * n_out + o) * n_x]);
            }
        }

        for (int o = 0; o < n_out; ++o) interp_row(plan, buf.data(), n_c, n_out, o, n_x, result[o].row(i));

        // fold the newly completed slab [t_{i-1}, t_i] into the accumulators
        fhat_cur = rfft(f.row(i), n_x);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int j = 0; j < n_c; ++j) {
            std::complex<double>* Rj = &R[(size_t)j * n_half * 3];
            const double* Pj = &tables->moments[(size_t)j * n_half * 4];
            for (int k = 0; k < n_half; ++k) {
                const std::complex<double> fL = fhat_prev[k], fR = fhat_cur[k];
                const double* P = Pj + (size_t)k * 4;
                for (int l = 0; l < 3; ++l)
                    Rj[(size_t)k * 3 + l] += fL * (P[l + 1] / dt) + fR * (P[l] - P[l + 1] / dt);
            }
        }
        fhat_prev.swap(fhat_cur);
    }
    return result;
}

std::vector<Field> run_reference(const GridSpec& g, const KernelFamily& fam, const Field& c,
                                 const Field& f, const std::vector<std::pair<int, int>>& outs) {
    check_engine_inputs(g, fam, c, f, nullptr);
    const KernelTables tab = build_kernel_tables(fam, g.dt(), g.n_x);
    const int n_x = g.n_x, n_half = n_x / 2 + 1, n_c = fam.n_c;
    const int n_out = (int)outs.size();
    const double dt = g.dt();

    std::vector<std::vector<std::complex<double>>> fhat((size_t)g.rows());
    for (int i = 0; i <= g.n_t; ++i) fhat[i] = rfft(f.row(i), n_x);

    std::vector<Field> result;
    result.reserve((size_t)n_out);
    for (int o = 0; o < n_out; ++o) result.emplace_back(g.rows(), n_x);
    std::vector<double> buf((size_t)n_c * n_out * n_x);
    std::vector<std::complex<double>> A((size_t)n_half * 3);
    std::vector<std::complex<double>> spec((size_t)n_half);

    for (int i = 1; i <= g.n_t; ++i) {
        const InterpPlan plan = plan_interp(fam, c.row(i), n_x);
        for (int j = 0; j < n_c; ++j) {
            const double cj = fam.c_node(j);
            std::fill(A.begin(), A.end(), std::complex<double>(0.0, 0.0));
            for (int m = 1; m < i; ++m) {
                const double b = dt * (i - m);
                for (int k = 0; k < n_half; ++k) {
                    const double khat = 2.0 * M_PI * k;
                    const double lam = cj * khat * khat;
                    const double eb = std::exp(-lam * b);
                    const double* P = &tab.moments[((size_t)j * n_half + k) * 4];
                    const std::complex<double> fL = fhat[m - 1][k], fR = fhat[m][k];
                    std::complex<double> S[3];
                    for (int l = 0; l < 3; ++l)
                        S[l] = fL * (P[l + 1] / dt) + fR * (P[l] - P[l + 1] / dt);
                    A[(size_t)k * 3 + 0] += eb * S[0];
                    A[(size_t)k * 3 + 1] += eb * (S[1] + b * S[0]);
                    A[(size_t)k * 3 + 2] += eb * (S[2] + 2.0 * b * S[1] + b * b * S[0]);
                }
            }
            for (int k = 0; k < n_half; ++k) {
                const double* P = &tab.moments[((size_t)j * n_half + k) * 4];
                for (int l = 0; l < 3; ++l) A[(size_t)k * 3 + l] += fhat[i - 1][k] * P[l];
            }
            for (int o = 0; o < n_out; ++o) {
                const int l = outs[o].first, kx = outs[o].second;
                for (int k = 0; k < n_half; ++k)
                    spec[k] = mode_symbol(l, kx, k, n_x) * A[(size_t)k * 3 + l];
                irfft(spec.data(), n_x, &buf[((size_t)j * n_out + o) * n_x]);
            }
        }
        for (int o = 0; o < n_out; ++o) interp_row(plan, buf.data(), n_c, n_out, o, n_x, result[o].row(i));
    }
    return result;
}

void validate_deriv_orders(int l, int k_t, int k_x) {
    if (k_t != 0) throw std::invalid_argument("time-derivative kernels are not supported");
    if (l < 0 || l > 2) throw std::invalid_argument("kernel parameter derivative order must be 0..2");
    if (k_x < 0 || k_x > 1) throw std::invalid_argument("spatial derivative order must be 0 or 1");
}

const std::vector<std::pair<int, int>> kMultiOuts = {{0, 0}, {1, 0}, {2, 0}, {1, 1}};

}  // namespace

MultiField apply_I_multi(const GridSpec& g, const KernelFamily& fam, const Field& c,
                         const Field& f, const KernelTables* tables) {
    auto r = run_engine(g, fam, c, f, kMultiOuts, tables);
    return MultiField{std::move(r[0]), std::move(r[1]), std::move(r[2]), std::move(r[3])};
}

Field apply_I(const GridSpec& g, const KernelFamily& fam, const Field& c, const Field& f,
              const KernelTables* tables) {
    return std::move(run_engine(g, fam, c, f, {{0, 0}}, tables)[0]);
}

Field apply_I_deriv(const GridSpec& g, const KernelFamily& fam, const Field& c, const Field& f,
                    int l, int k_t, int k_x, const KernelTables* tables) {
    validate_deriv_orders(l, k_t, k_x);
    return std::move(run_engine(g, fam, c, f, {{l, k_x}}, tables)[0]);
}

MultiField apply_I_multi_reference(const GridSpec& g, const KernelFamily& fam, const Field& c,
                                   const Field& f) {
    auto r = run_reference(g, fam, c, f, kMultiOuts);
    return MultiField{std::move(r[0]), std::move(r[1]), std::move(r[2]), std::move(r[3])};
}

Field apply_I_reference(const GridSpec& g, const KernelFamily& fam, const Field& c,
                        const Field& f) {
    return std::move(run_reference(g, fam, c, f, {{0, 0}})[0]);
}

Field apply_Ihat(const GridSpec& g, const KernelFamily& fam, const Field& c,
                 const std::vector<double>& u0, int l, int k_t, int k_x) {
    validate_deriv_orders(l, k_t, k_x);
    if ((g.n_x & (g.n_x - 1)) != 0) throw std::invalid_argument("n_x must be a power of two");
    if ((int)u0.size() != g.n_x) throw std::invalid_argument("initial condition size mismatch");
    if (c.rows != g.rows() || c.n_x != g.n_x)
        throw std::invalid_argument("field shape does not match the grid");
    if (fam.n_c < 4 || fam.n_c > kMaxNodes)
        throw std::invalid_argument("kernel family needs between 4 and 128 nodes");

    const int n_x = g.n_x, n_half = n_x / 2 + 1, n_c = fam.n_c;
    const auto u0hat = rfft(u0.data(), n_x);
    Field out(g.rows(), n_x);
    std::vector<double> buf((size_t)n_c * n_x);

    for (int i = 0; i <= g.n_t; ++i) {
        const double t = g.time(i);
        const InterpPlan plan = plan_interp(fam, c.row(i), n_x);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int j = 0; j < n_c; ++j) {
            const double cj = fam.c_node(j);
            std::vector<std::complex<double>> spec((size_t)n_half);
            for (int k = 0; k < n_half; ++k) {
                const double khat = 2.0 * M_PI * k;
                double tfac = 1.0;
                for (int q = 0; q < l; ++q) tfac *= -khat * khat * t;
                const double damp = std::exp(-cj * khat * khat * t);
                spec[k] = mode_symbol(0, k_x, k, n_x) * (tfac * damp) * u0hat[k];
            }
            irfft(spec.data(), n_x, &buf[(size_t)j * n_x]);
        }
        interp_row(plan, buf.data(), n_c, 1, 0, n_x, out.row(i));
    }
    return out;
}

}  // namespace qk
