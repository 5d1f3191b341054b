// Gauss-Legendre and Gauss-Hermite rules by Newton iteration on the
// three-term recurrences; sizes used here are small (< 100 nodes).
#include "quasikit/quadrature.h"

#include <cmath>
#include <stdexcept>

namespace qk {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("quadrature order must be positive");
    x.assign((size_t)n, 0.0);
    w.assign((size_t)n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            const double step = p0 / pp;
            t -= step;
            if (std::abs(step) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - t);
        x[n - 1 - i] = 0.5 * (1.0 + t);
        w[i] = w[n - 1 - i] = 1.0 / ((1.0 - t * t) * pp * pp);
    }
}

void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("quadrature order must be positive");
    x.assign((size_t)n, 0.0);
    w.assign((size_t)n, 0.0);
    const double pim4 = std::pow(M_PI, -0.25);
    double z = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // standard initial guesses for the largest roots, then step inward
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow((double)n, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            // orthonormal Hermite recurrence keeps magnitudes tame
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt((double)j / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double step = p1 / pp;
            z -= step;
            if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
        }
        // x[i] holds the i-th largest root; mirror to the negative side
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace qk
