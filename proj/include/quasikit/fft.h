// Radix-2 complex FFT and real-spectrum helpers used by the kernel operators.
#pragma once

#include <complex>
#include <vector>

namespace qk {

// In-place iterative Cooley-Tukey transform; size must be a power of two.
// Forward convention: X_k = sum_n x_n exp(-2*pi*i*k*n/N); inverse divides by N.
void fft_complex(std::vector<std::complex<double>>& a, bool inverse);

// Half-spectrum transform of n real samples (returns n/2+1 coefficients).
std::vector<std::complex<double>> rfft(const double* x, int n);

// Hermitian synthesis of a half spectrum back to n real samples.
void irfft(const std::complex<double>* half, int n, double* out);

}  // namespace qk
