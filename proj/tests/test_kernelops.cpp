#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "quasikit/fft.h"
#include "quasikit/grid.h"
#include "quasikit/kernels.h"

using namespace qk;

namespace {

// long-double composite Simpson oracle for the slab moments; the domain is
// clipped to the decay boundary layer so steep integrands stay resolved
long double moment_oracle(int m, long double lam, long double dt) {
    const int N = 65536;
    long double hi = dt;
    if (lam > 0 && 60.0L / lam < hi) hi = 60.0L / lam;
    const long double h = hi / N;
    long double s = 0.0L;
    for (int i = 0; i <= N; ++i) {
        const long double a = h * i;
        const long double f = powl(a, m) * expl(-lam * a);
        s += f * ((i == 0 || i == N) ? 1.0L : (i % 2 ? 4.0L : 2.0L));
    }
    return s * h / 3.0L;
}

// independent closed forms (long double) for exp-weighted moments on [0,t]
long double Q0(long double nu, long double t) { return (1.0L - expl(-nu * t)) / nu; }
long double Q1(long double nu, long double t) {
    return (Q0(nu, t) - t * expl(-nu * t)) / nu;
}
long double Q2(long double nu, long double t) {
    return (2.0L * Q1(nu, t) - t * t * expl(-nu * t)) / nu;
}

double field_gap(const Field& a, const Field& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}
double field_max(const Field& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

Field smooth_forcing(const GridSpec& g) {
    Field f(g.rows(), g.n_x);
    for (int i = 0; i <= g.n_t; ++i) {
        const double t = g.time(i);
        for (int x = 0; x < g.n_x; ++x) {
            const double y = (double)x / g.n_x;
            f.at(i, x) = std::sin(2 * M_PI * y + 3 * t) + 0.4 * std::cos(4 * M_PI * y) * (1 + t) +
                         0.2 * std::sin(6 * M_PI * y - t) + 0.3 * t;
        }
    }
    return f;
}

Field smooth_cfield(const GridSpec& g, double lo, double hi) {
    Field c(g.rows(), g.n_x);
    for (int i = 0; i <= g.n_t; ++i) {
        const double t = g.time(i);
        for (int x = 0; x < g.n_x; ++x) {
            const double y = (double)x / g.n_x;
            const double s = 0.5 + 0.35 * std::sin(2 * M_PI * y) * std::cos(1.7 * t) +
                             0.1 * std::sin(4 * M_PI * y + t);
            c.at(i, x) = lo + (hi - lo) * s;
        }
    }
    return c;
}

}  // namespace

TEST_CASE("fft roundtrip, naive DFT match, Parseval") {
    const int n = 16;
    std::vector<std::complex<double>> a(n);
    for (int i = 0; i < n; ++i) a[i] = {std::sin(1.3 * i + 0.2), std::cos(0.7 * i)};
    auto b = a;
    fft_complex(b, false);
    // naive DFT
    for (int k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (int j = 0; j < n; ++j)
            s += a[j] * std::exp(std::complex<double>(0, -2.0 * M_PI * k * j / n));
        CHECK(std::abs(s - b[k]) < 1e-12);
    }
    double e1 = 0, e2 = 0;
    for (int i = 0; i < n; ++i) e1 += std::norm(a[i]);
    for (int i = 0; i < n; ++i) e2 += std::norm(b[i]);
    CHECK(std::abs(e2 - n * e1) < 1e-10);
    fft_complex(b, true);
    for (int i = 0; i < n; ++i) CHECK(std::abs(b[i] - a[i]) < 1e-13);

    std::vector<double> r(64);
    for (int i = 0; i < 64; ++i) r[i] = std::cos(2 * M_PI * 5 * i / 64.0) + 0.1 * i;
    auto half = rfft(r.data(), 64);
    std::vector<double> back(64);
    irfft(half.data(), 64, back.data());
    for (int i = 0; i < 64; ++i) CHECK(std::abs(back[i] - r[i]) < 1e-12);

    std::vector<std::complex<double>> bad(12);
    CHECK_THROWS_AS(fft_complex(bad, false), std::invalid_argument);
}

TEST_CASE("exponential slab moments match a long-double quadrature oracle") {
    const double dts[] = {1e-3, 0.05};
    const double lamfac[] = {0.0, 1e-6, 0.1, 0.499, 0.501, 2.0, 12.0, 80.0};
    for (double dt : dts)
        for (double xf : lamfac) {
            const double lam = xf / dt;
            const auto P = exponential_moments(lam, dt);
            for (int m = 0; m < 4; ++m) {
                const long double ref = moment_oracle(m, lam, dt);
                CHECK(std::abs((double)((P[m] - ref) / ref)) < 1e-12);
            }
        }
    CHECK_THROWS_AS(exponential_moments(-1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(exponential_moments(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("periodic heat kernel: mass, symmetry, spectral agreement") {
    const double c = 1.2, r = 0.03;
    const int n = 512, M = 12;
    double mass = 0.0;
    for (int j = 0; j < n; ++j) mass += heat_kernel(c, r, (double)j / n, M);
    mass /= n;
    CHECK(std::abs(mass - 1.0) < 1e-12);
    CHECK(heat_kernel(c, r, 0.21, M) == doctest::Approx(heat_kernel(c, r, -0.21, M)).epsilon(1e-13));
    // spectral representation
    const double z = 0.3, r2 = 0.02;
    double spec = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double khat = 2 * M_PI * k;
        spec += 2.0 * std::exp(-1.0 * khat * khat * r2) * std::cos(khat * z);
    }
    CHECK(std::abs(spec - heat_kernel(1.0, r2, z, 10)) < 1e-12);
    CHECK_THROWS_AS(heat_kernel(0.0, r, 0.1, M), std::domain_error);
    CHECK_THROWS_AS(heat_kernel(c, -0.1, 0.1, M), std::domain_error);
}

TEST_CASE("kernel parameter derivatives: finite differences and the semigroup identity") {
    const double c = 1.5, r = 0.05, M = 12;
    const double zs[] = {0.0, 0.13, 0.37};
    for (double z : zs) {
        const double h1 = 1e-5;
        const double fd1 = (heat_kernel(c + h1, r, z, M) - heat_kernel(c - h1, r, z, M)) / (2 * h1);
        const double d1 = dc_heat_kernel(1, c, r, z, M);
        CHECK(std::abs(fd1 - d1) < 1e-7 * (1.0 + std::abs(d1)));

        const double h2 = 1e-4;
        const double fd2 = (heat_kernel(c + h2, r, z, M) - 2 * heat_kernel(c, r, z, M) +
                            heat_kernel(c - h2, r, z, M)) /
                           (h2 * h2);
        const double d2 = dc_heat_kernel(2, c, r, z, M);
        CHECK(std::abs(fd2 - d2) < 1e-5 * (1.0 + std::abs(d2)));

        // independent route: l! * d_x^{2l} of the (l+1)-fold self-convolution
        const double conv1 = dc_heat_kernel_conv(1, c, r, z, 512, 32, M);
        CHECK(std::abs(conv1 - d1) < 1e-10 * (1.0 + std::abs(d1)));
        // the doubly nested route hits very small kernel times at the inner
        // quadrature nodes, so it needs the finer grid to stay alias-free
        const double conv2 = dc_heat_kernel_conv(2, c, r, z, 2048, 16, M);
        CHECK(std::abs(conv2 - d2) < 1e-9 * (1.0 + std::abs(d2)));
    }
    CHECK(dc_heat_kernel(0, c, r, 0.2, M) == heat_kernel(c, r, 0.2, M));
}

TEST_CASE("unit forcing integrates to elapsed time for any parameter field") {
    GridSpec g{64, 48, 0.3};
    KernelFamily fam{0.6, 2.4, 9, 12};
    Field c = smooth_cfield(g, 0.8, 2.1);
    Field f(g.rows(), g.n_x);
    for (double& v : f.v) v = 1.0;
    Field out = apply_I(g, fam, c, f);
    for (int i = 0; i <= g.n_t; ++i)
        for (int x = 0; x < g.n_x; ++x) CHECK(std::abs(out.at(i, x) - g.time(i)) < 1e-13);
}

TEST_CASE("operators are linear in the forcing") {
    GridSpec g{32, 24, 0.2};
    KernelFamily fam{0.6, 2.4, 9, 12};
    Field c = smooth_cfield(g, 0.8, 2.1);
    Field f1 = smooth_forcing(g);
    Field f2(g.rows(), g.n_x);
    for (int i = 0; i <= g.n_t; ++i)
        for (int x = 0; x < g.n_x; ++x)
            f2.at(i, x) = std::cos(2 * M_PI * (x + 0.5) / g.n_x) * (1.0 + g.time(i));
    Field comb(g.rows(), g.n_x);
    for (size_t i = 0; i < comb.v.size(); ++i) comb.v[i] = 2.5 * f1.v[i] - 0.75 * f2.v[i];
    Field a = apply_I(g, fam, c, f1), b = apply_I(g, fam, c, f2);
    Field ab = apply_I(g, fam, c, comb);
    double scale = std::max(field_max(a), field_max(b));
    for (size_t i = 0; i < ab.v.size(); ++i)
        CHECK(std::abs(ab.v[i] - (2.5 * a.v[i] - 0.75 * b.v[i])) < 1e-12 * scale);
}

TEST_CASE("single-mode forcing reproduces the exact mild solution") {
    GridSpec g{64, 512, 0.5};
    KernelFamily fam{0.5, 3.0, 17, 12};
    // frozen diffusivity on a family node so no interpolation error mixes in
    const double cval = fam.c_node(5), mu1 = 0.7, mu2 = -0.9, a1 = 1.0, a2 = 0.6;
    const double k1 = 2 * M_PI, k2 = 4 * M_PI;
    Field c(g.rows(), g.n_x);
    for (double& v : c.v) v = cval;
    Field f(g.rows(), g.n_x);
    for (int i = 0; i <= g.n_t; ++i) {
        const double t = g.time(i);
        for (int x = 0; x < g.n_x; ++x) {
            const double y = (double)x / g.n_x;
            f.at(i, x) = a1 * std::exp(mu1 * t) * std::cos(k1 * y) +
                         a2 * std::exp(mu2 * t) * std::sin(k2 * y);
        }
    }
    MultiField mf = apply_I_multi(g, fam, c, f);

    Field eI(g.rows(), g.n_x), eI1(g.rows(), g.n_x), eI2(g.rows(), g.n_x), eI1x(g.rows(), g.n_x);
    for (int i = 0; i <= g.n_t; ++i) {
        const double t = g.time(i);
        const long double nu1 = cval * k1 * k1 + mu1, nu2 = cval * k2 * k2 + mu2;
        const double b10 = a1 * std::exp(mu1 * t) * (double)Q0(nu1, t);
        const double b20 = a2 * std::exp(mu2 * t) * (double)Q0(nu2, t);
        const double b11 = a1 * std::exp(mu1 * t) * (double)Q1(nu1, t);
        const double b21 = a2 * std::exp(mu2 * t) * (double)Q1(nu2, t);
        const double b12 = a1 * std::exp(mu1 * t) * (double)Q2(nu1, t);
        const double b22 = a2 * std::exp(mu2 * t) * (double)Q2(nu2, t);
        for (int x = 0; x < g.n_x; ++x) {
            const double y = (double)x / g.n_x;
            const double co1 = std::cos(k1 * y), si1 = std::sin(k1 * y);
            const double co2 = std::cos(k2 * y), si2 = std::sin(k2 * y);
            if (i == 0) continue;  // operator output is zero at t = 0
            eI.at(i, x) = b10 * co1 + b20 * si2;
            eI1.at(i, x) = -k1 * k1 * b11 * co1 - k2 * k2 * b21 * si2;
            eI2.at(i, x) = k1 * k1 * k1 * k1 * b12 * co1 + k2 * k2 * k2 * k2 * b22 * si2;
            eI1x.at(i, x) = k1 * k1 * k1 * b11 * si1 - k2 * k2 * k2 * b21 * co2;
        }
    }
    CHECK(field_gap(mf.I, eI) / field_max(eI) < 1e-4);
    CHECK(field_gap(mf.I1, eI1) / field_max(eI1) < 1e-4);
    CHECK(field_gap(mf.I2, eI2) / field_max(eI2) < 1e-4);
    CHECK(field_gap(mf.I1x, eI1x) / field_max(eI1x) < 1e-4);
}

TEST_CASE("interpolation over diffusivity nodes converges at fourth order") {
    GridSpec g{64, 64, 0.25};
    Field c = smooth_cfield(g, 0.9, 2.1);
    Field f = smooth_forcing(g);
    auto with_nodes = [&](int n_c) {
        KernelFamily fam{0.6, 2.4, n_c, 12};
        return apply_I(g, fam, c, f);
    };
    Field truth = with_nodes(65);
    const double e9 = field_gap(with_nodes(9), truth);
    const double e17 = field_gap(with_nodes(17), truth);
    CHECK(e9 > 0);
    CHECK(e9 / e17 > 8.0);
}

TEST_CASE("output rows depend only on earlier forcing rows") {
    GridSpec g{32, 20, 0.2};
    KernelFamily fam{0.6, 2.4, 9, 12};
    Field c = smooth_cfield(g, 0.8, 2.1);
    Field f1 = smooth_forcing(g);
    Field f2 = f1;
    const int m = 12;
    for (int i = m; i <= g.n_t; ++i)
        for (int x = 0; x < g.n_x; ++x) f2.at(i, x) += std::sin(x + i);
    MultiField a = apply_I_multi(g, fam, c, f1);
    MultiField b = apply_I_multi(g, fam, c, f2);
    for (int i = 0; i <= m; ++i)
        for (int x = 0; x < g.n_x; ++x) {
            CHECK(a.I.at(i, x) == b.I.at(i, x));
            CHECK(a.I1.at(i, x) == b.I1.at(i, x));
            CHECK(a.I2.at(i, x) == b.I2.at(i, x));
            CHECK(a.I1x.at(i, x) == b.I1x.at(i, x));
        }
    CHECK(a.I.at(m + 1, 0) != b.I.at(m + 1, 0));
    for (int x = 0; x < g.n_x; ++x) {
        CHECK(a.I.at(0, x) == 0.0);
        CHECK(a.I1.at(0, x) == 0.0);
    }
}

TEST_CASE("spatial-derivative output equals the spectral derivative for frozen c") {
    GridSpec g{64, 32, 0.2};
    KernelFamily fam{0.5, 3.0, 9, 12};
    Field c(g.rows(), g.n_x);
    for (double& v : c.v) v = 1.7;
    Field f = smooth_forcing(g);
    MultiField mf = apply_I_multi(g, fam, c, f);
    double scale = field_max(mf.I1x) + 1e-30;
    for (int i = 1; i <= g.n_t; ++i) {
        auto half = rfft(mf.I1.row(i), g.n_x);
        for (int k = 0; k <= g.n_x / 2; ++k) {
            const double khat = 2 * M_PI * k;
            half[k] *= (k == g.n_x / 2) ? std::complex<double>(0, 0)
                                        : std::complex<double>(0, khat);
        }
        std::vector<double> dx(g.n_x);
        irfft(half.data(), g.n_x, dx.data());
        for (int x = 0; x < g.n_x; ++x)
            CHECK(std::abs(dx[x] - mf.I1x.at(i, x)) < 1e-11 * scale);
    }
}

TEST_CASE("recursive engine agrees with the quadratic-cost reference") {
    GridSpec g{128, 96, 0.3};
    KernelFamily fam{0.6, 2.4, 9, 12};
    Field c = smooth_cfield(g, 0.8, 2.1);
    Field f = smooth_forcing(g);
    MultiField fast = apply_I_multi(g, fam, c, f);
    MultiField ref = apply_I_multi_reference(g, fam, c, f);
    CHECK(field_gap(fast.I, ref.I) < 1e-10 * (field_max(ref.I) + 1));
    CHECK(field_gap(fast.I1, ref.I1) < 1e-10 * (field_max(ref.I1) + 1));
    CHECK(field_gap(fast.I2, ref.I2) < 1e-10 * (field_max(ref.I2) + 1));
    CHECK(field_gap(fast.I1x, ref.I1x) < 1e-10 * (field_max(ref.I1x) + 1));
}

TEST_CASE("initial-condition propagator matches per-mode decay") {
    GridSpec g{64, 32, 0.2};
    KernelFamily fam{0.5, 3.0, 11, 12};
    const double cval = fam.c_node(3);  // 1.25, exactly on a node
    Field c(g.rows(), g.n_x);
    for (double& v : c.v) v = cval;
    std::vector<double> u0(g.n_x);
    for (int x = 0; x < g.n_x; ++x) {
        const double y = (double)x / g.n_x;
        u0[x] = 1.0 + 0.8 * std::cos(2 * M_PI * y) + 0.3 * std::sin(6 * M_PI * y);
    }
    Field h0 = apply_Ihat(g, fam, c, u0, 0, 0, 0);
    Field h1 = apply_Ihat(g, fam, c, u0, 1, 0, 0);
    Field hx = apply_Ihat(g, fam, c, u0, 0, 0, 1);
    for (int x = 0; x < g.n_x; ++x) {
        CHECK(std::abs(h0.at(0, x) - u0[x]) < 1e-13);
        CHECK(h1.at(0, x) == 0.0);
    }
    const double k1 = 2 * M_PI, k3 = 6 * M_PI;
    for (int i = 0; i <= g.n_t; ++i) {
        const double t = g.time(i);
        for (int x = 0; x < g.n_x; x += 5) {
            const double y = (double)x / g.n_x;
            const double e0 = 1.0 + 0.8 * std::exp(-cval * k1 * k1 * t) * std::cos(k1 * y) +
                              0.3 * std::exp(-cval * k3 * k3 * t) * std::sin(k3 * y);
            CHECK(std::abs(h0.at(i, x) - e0) < 1e-12);
            const double e1 = 0.8 * (-k1 * k1 * t) * std::exp(-cval * k1 * k1 * t) * std::cos(k1 * y) +
                              0.3 * (-k3 * k3 * t) * std::exp(-cval * k3 * k3 * t) * std::sin(k3 * y);
            CHECK(std::abs(h1.at(i, x) - e1) < 1e-12);
            const double ex = -0.8 * k1 * std::exp(-cval * k1 * k1 * t) * std::sin(k1 * y) +
                              0.3 * k3 * std::exp(-cval * k3 * k3 * t) * std::cos(k3 * y);
            CHECK(std::abs(hx.at(i, x) - ex) < 1e-12);
        }
    }
}

TEST_CASE("kernel table cache round-trips and rejects foreign files") {
    KernelFamily fam{0.6, 2.4, 9, 12};
    KernelTables t = build_kernel_tables(fam, 0.01, 64);
    const std::string path = "/tmp/qk_tables_test.qkkt";
    save_kernel_tables(path, t);
    KernelTables u = load_kernel_tables(path);
    CHECK(u.n_c == t.n_c);
    CHECK(u.n_x == t.n_x);
    CHECK(u.c_min == t.c_min);
    CHECK(u.c_max == t.c_max);
    CHECK(u.dt == t.dt);
    CHECK(u.damp == t.damp);
    CHECK(u.moments == t.moments);

    {
        FILE* fp = std::fopen(path.c_str(), "wb");
        std::fwrite("NOPE", 1, 4, fp);
        std::fclose(fp);
    }
    CHECK_THROWS_WITH_AS(load_kernel_tables(path), doctest::Contains("not a kernel table"),
                         std::runtime_error);

    // cached tables are validated against the requested configuration
    GridSpec g{64, 20, 0.2};  // dt = 0.01, matches
    Field c(g.rows(), g.n_x);
    for (double& v : c.v) v = 1.0;
    Field f = smooth_forcing(g);
    CHECK_NOTHROW(apply_I(g, fam, c, f, &t));
    GridSpec g2{64, 40, 0.2};  // dt mismatch
    Field c2(g2.rows(), g2.n_x);
    for (double& v : c2.v) v = 1.0;
    Field f2(g2.rows(), g2.n_x);
    CHECK_THROWS_AS(apply_I(g2, fam, c2, f2, &t), std::invalid_argument);
}

TEST_CASE("invalid requests are rejected") {
    GridSpec g{32, 10, 0.1};
    KernelFamily fam{0.6, 2.4, 9, 12};
    Field c(g.rows(), g.n_x);
    for (double& v : c.v) v = 1.0;
    Field f(g.rows(), g.n_x);
    CHECK_THROWS_WITH_AS(apply_I_deriv(g, fam, c, f, 1, 1, 0),
                         doctest::Contains("time-derivative"), std::invalid_argument);
    CHECK_THROWS_AS(apply_I_deriv(g, fam, c, f, 3, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(apply_Ihat(g, fam, c, std::vector<double>(g.n_x), 0, 2, 0),
                    std::invalid_argument);

    Field cbad = c;
    cbad.at(5, 3) = 0.1;  // below c_min
    CHECK_THROWS_AS(apply_I(g, fam, cbad, f), std::domain_error);

    GridSpec godd{48, 10, 0.1};  // not a power of two
    Field codd(godd.rows(), godd.n_x);
    for (double& v : codd.v) v = 1.0;
    Field fodd(godd.rows(), godd.n_x);
    CHECK_THROWS_AS(apply_I(godd, fam, codd, fodd), std::invalid_argument);

    KernelFamily tiny{0.6, 2.4, 3, 12};
    CHECK_THROWS_AS(apply_I(g, tiny, c, f), std::invalid_argument);
}
