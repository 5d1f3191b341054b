// Iterative radix-2 FFT plus the real half-spectrum wrappers.
#include "quasikit/fft.h"

#include <cmath>
#include <stdexcept>

namespace qk {

void fft_complex(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft size must be a power of two");
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double base = (inverse ? 2.0 : -2.0) * M_PI;
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = base / (double)len;
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= (double)n;
}

std::vector<std::complex<double>> rfft(const double* x, int n) {
    std::vector<std::complex<double>> a(x, x + n);
    fft_complex(a, false);
    return std::vector<std::complex<double>>(a.begin(), a.begin() + n / 2 + 1);
}

void irfft(const std::complex<double>* half, int n, double* out) {
    std::vector<std::complex<double>> a((size_t)n);
    for (int k = 0; k <= n / 2; ++k) a[k] = half[k];
    for (int k = n / 2 + 1; k < n; ++k) a[k] = std::conj(half[n - k]);
    fft_complex(a, true);
    for (int i = 0; i < n; ++i) out[i] = a[i].real();
}

}  // namespace qk
