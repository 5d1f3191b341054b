// Benchmark: recursive kernel-operator engine against the quadratic-cost
// reference evaluation, over a sweep of time resolutions.
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>

#include "quasikit/kernels.h"

using namespace qk;

namespace {

double wall_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double max_gap(const Field& a, const Field& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

}  // namespace

int main() {
    const int n_x = 512;
    const KernelFamily fam{0.6, 2.4, 9, 12};
    std::cout << "kernel operator benchmark  (n_x = " << n_x << ", n_c = " << fam.n_c << ")\n";
    std::cout << std::setw(8) << "n_t" << std::setw(14) << "recursive[s]" << std::setw(14)
              << "reference[s]" << std::setw(10) << "speedup" << std::setw(14) << "max gap"
              << "\n";
    for (int n_t : {64, 128, 256}) {
        GridSpec g{n_x, n_t, 0.25};
        Field c(g.rows(), n_x), f(g.rows(), n_x);
        for (int i = 0; i <= n_t; ++i) {
            const double t = g.time(i);
            for (int x = 0; x < n_x; ++x) {
                const double y = (double)x / n_x;
                c.at(i, x) = 1.5 + 0.6 * std::sin(2 * M_PI * y) * std::cos(1.3 * t);
                f.at(i, x) = std::sin(2 * M_PI * y + 3 * t) + 0.4 * std::cos(4 * M_PI * y);
            }
        }
        const double t0 = wall_seconds();
        MultiField fast = apply_I_multi(g, fam, c, f);
        const double t1 = wall_seconds();
        MultiField ref = apply_I_multi_reference(g, fam, c, f);
        const double t2 = wall_seconds();
        const double gap = std::max(std::max(max_gap(fast.I, ref.I), max_gap(fast.I1, ref.I1)),
                                    std::max(max_gap(fast.I2, ref.I2), max_gap(fast.I1x, ref.I1x)));
        std::cout << std::setw(8) << n_t << std::fixed << std::setprecision(4) << std::setw(14)
                  << (t1 - t0) << std::setw(14) << (t2 - t1) << std::setprecision(1)
                  << std::setw(10) << (t2 - t1) / (t1 - t0) << std::scientific
                  << std::setprecision(2) << std::setw(14) << gap << "\n";
        std::cout.unsetf(std::ios_base::floatfield);
    }
    return 0;
}
