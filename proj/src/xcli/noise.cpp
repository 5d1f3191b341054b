// Spectral synthesis of the stationary Gaussian noise and its grid
// mollification.  Modes live on the doubled time window so the solve
// interval never sees its own periodic image; every mode draws from a
// counter-based generator, making fields pure functions of (seed, grid).
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "quasikit/fft.h"
#include "quasikit/xcli.h"

namespace qk {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// splitmix64 finalizer: the counter stream for mode `idx` of stream `seed`
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t bits) {
    // (0,1]: top 53 bits plus half an ulp keeps log() finite
    return ((bits >> 11) + 0.5) * 0x1.0p-53;
}

// standard normal pair for mode counter `idx`, via Box-Muller
void gauss_pair(std::uint64_t seed, std::uint64_t idx, double* g0, double* g1) {
    const std::uint64_t a = mix64(seed ^ mix64(2 * idx));
    const std::uint64_t b = mix64(seed ^ mix64(2 * idx + 1));
    const double r = std::sqrt(-2.0 * std::log(uniform01(a)));
    const double th = 2.0 * M_PI * uniform01(b);
    *g0 = r * std::cos(th);
    *g1 = r * std::sin(th);
}

void validate_noise(const NoiseSpec& spec) {
    if (!(spec.nu > 0.0) || !(spec.nu < 2.0))
        throw std::invalid_argument("noise exponent must lie in (0,2)");
    if (!(spec.mu >= 0.0))
        throw std::invalid_argument("spectral floor must be nonnegative");
    if (!power_of_two(spec.grid.n_x) || !power_of_two(2 * spec.grid.n_t))
        throw std::invalid_argument("noise lattice sizes must be powers of two");
    if (!(spec.grid.T > 0.0)) throw std::invalid_argument("horizon must be positive");
}

// At mu = 0 the zero mode is singular and is dropped, centring the field.
double spectral_density(const NoiseSpec& spec, double omega, double k) {
    const double arg = spec.mu * spec.mu + std::fabs(omega) + k * k;
    if (arg == 0.0) return 0.0;
    return std::pow(arg, -0.5 * spec.nu);
}

}  // namespace

Field sample_noise(const NoiseSpec& spec) {
    validate_noise(spec);
    const int nt = 2 * spec.grid.n_t;  // full lattice rows
    const int nx = spec.grid.n_x;
    const double period = 2.0 * spec.grid.T;

    // Hermitian half of the mode array: H[q][m] = sqrt(S/period) g_{qm} with
    // g at the conjugate mode the conjugate draw, so the synthesis is real.
    std::vector<std::complex<double>> h((size_t)nt * nx);
    const double inv_sqrt2 = std::sqrt(0.5);
    for (int q = 0; q < nt; ++q) {
        const int qt = (q <= nt / 2) ? q : q - nt;
        const double omega = 2.0 * M_PI * qt / period;
        const int q2 = (nt - q) % nt;
        for (int m = 0; m < nx; ++m) {
            const int m2 = (nx - m) % nx;
            if (q2 < q || (q2 == q && m2 < m)) continue;  // filled by the partner
            const int mt = (m <= nx / 2) ? m : m - nx;
            const double k = 2.0 * M_PI * mt;
            const double amp = std::sqrt(spectral_density(spec, omega, k) / period);
            double g0, g1;
            gauss_pair(spec.seed, (std::uint64_t)q * nx + m, &g0, &g1);
            if (q2 == q && m2 == m) {
                h[(size_t)q * nx + m] = amp * g0;  // self-conjugate: real
            } else {
                const std::complex<double> g(g0 * inv_sqrt2, g1 * inv_sqrt2);
                h[(size_t)q * nx + m] = amp * g;
                h[(size_t)q2 * nx + m2] = amp * std::conj(g);
            }
        }
    }

    // xi = sum_modes H exp(+2 pi i (qi/nt + mj/nx)): inverse transforms times
    // the lattice size, folded into a single scale factor at the end.
    for (int q = 0; q < nt; ++q) {
        std::vector<std::complex<double>> row(h.begin() + (size_t)q * nx,
                                              h.begin() + (size_t)(q + 1) * nx);
        fft_complex(row, true);
        for (int m = 0; m < nx; ++m) h[(size_t)q * nx + m] = row[m];
    }
    std::vector<std::complex<double>> col(nt);
    Field xi(nt, nx);
    const double scale = (double)nt * nx;
    for (int m = 0; m < nx; ++m) {
        for (int q = 0; q < nt; ++q) col[q] = h[(size_t)q * nx + m];
        fft_complex(col, true);
        for (int q = 0; q < nt; ++q) xi.at(q, m) = scale * col[q].real();
    }
    return xi;
}

double noise_covariance_exact(const NoiseSpec& spec, int j) {
    validate_noise(spec);
    const int nt = 2 * spec.grid.n_t;
    const int nx = spec.grid.n_x;
    const double period = 2.0 * spec.grid.T;
    // E[xi(t,x+y) xi(t,x)] = (1/period) sum_modes S(omega,k) cos(k y)
    long double acc = 0.0L;
    for (int q = 0; q < nt; ++q) {
        const int qt = (q <= nt / 2) ? q : q - nt;
        const double omega = 2.0 * M_PI * qt / period;
        long double rowsum = 0.0L;
        for (int m = 0; m < nx; ++m) {
            const int mt = (m <= nx / 2) ? m : m - nx;
            const double k = 2.0 * M_PI * mt;
            rowsum += (long double)(spectral_density(spec, omega, k) *
                                    std::cos(k * (double)j / nx));
        }
        acc += rowsum;
    }
    return (double)(acc / period);
}

Field mollify_noise(const Field& xi, const GridSpec& grid, double eps,
                    const MollifierSpec& mol) {
    if (!(eps > 0.0) || eps < 4.0 * grid.dx())
        throw std::invalid_argument("mollification scale must span at least 4 grid cells");
    if (mol.variant < 0 || mol.variant > 1)
        throw std::invalid_argument("mollifier variant must be 0 or 1");
    const int nt = xi.rows, nx = xi.n_x;
    if (nx != grid.n_x || nt != 2 * grid.n_t)
        throw std::invalid_argument("field does not match the noise lattice");

    auto phi = [&](double s) {
        const double a = std::fabs(s);
        if (a >= 1.0) return 0.0;
        const double p = (mol.variant == 0) ? a * a : a * a * a * a;
        return std::exp(-1.0 / (1.0 - p));
    };

    // spatial pass: periodic convolution by one FFT per row against the
    // spectrum of the sampled unit-sum weight vector
    std::vector<double> wx(nx, 0.0);
    {
        const int rad = std::min(nx / 2 - 1, (int)std::floor(eps / grid.dx()));
        double sum = 0.0;
        for (int k = -rad; k <= rad; ++k) sum += phi(k * grid.dx() / eps);
        for (int k = -rad; k <= rad; ++k)
            wx[(k + nx) % nx] = phi(k * grid.dx() / eps) / sum;
    }
    std::vector<std::complex<double>> what = rfft(wx.data(), nx);
    Field spat(nt, nx);
    for (int i = 0; i < nt; ++i) {
        std::vector<std::complex<double>> half = rfft(xi.row(i), nx);
        for (size_t m = 0; m < half.size(); ++m) half[m] *= what[m];
        irfft(half.data(), nx, spat.row(i));
    }

    // time pass: short direct periodic convolution at scale eps^2 (reduces to
    // the identity once eps^2 drops below the step)
    const int radt = std::min(nt / 2 - 1, (int)std::floor(eps * eps / grid.dt()));
    std::vector<double> wt(2 * radt + 1);
    double sumt = 0.0;
    for (int k = -radt; k <= radt; ++k) {
        wt[k + radt] = phi(k * grid.dt() / (eps * eps));
        sumt += wt[k + radt];
    }
    for (double& w : wt) w /= sumt;
    Field out(nt, nx);
    for (int i = 0; i < nt; ++i) {
        double* dst = out.row(i);
        for (int k = -radt; k <= radt; ++k) {
            const double w = wt[k + radt];
            const double* src = spat.row(((i + k) % nt + nt) % nt);
            for (int j = 0; j < nx; ++j) dst[j] += w * src[j];
        }
    }
    return out;
}

Field solver_window(const Field& full, const GridSpec& grid) {
    if (full.n_x != grid.n_x || full.rows < grid.n_t + 1)
        throw std::invalid_argument("field does not cover the solver window");
    Field out(grid.n_t + 1, grid.n_x);
    for (int i = 0; i <= grid.n_t; ++i)
        for (int j = 0; j < grid.n_x; ++j) out.at(i, j) = full.at(i, j);
    return out;
}

}  // namespace qk
