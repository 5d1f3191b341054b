// Space-time grid conventions shared by the kernel operators and solvers.
//
// Space is the unit circle sampled at n_x equispaced points x_j = j/n_x.
// Time is [0, T] sampled at n_t+1 levels t_i = i*T/n_t.  A Field stores one
// sample per grid node in row-major order (time level major).
#pragma once

#include <stdexcept>
#include <vector>

namespace qk {

struct GridSpec {
    int n_x = 256;
    int n_t = 256;
    double T = 0.5;

    double dx() const { return 1.0 / n_x; }
    double dt() const { return T / n_t; }
    int rows() const { return n_t + 1; }
    double time(int i) const { return T * i / n_t; }
};

struct Field {
    int rows = 0;
    int n_x = 0;
    std::vector<double> v;

    Field() = default;
    Field(int rows_, int nx) : rows(rows_), n_x(nx), v((size_t)rows_ * nx, 0.0) {
        if (rows_ <= 0 || nx <= 0) throw std::invalid_argument("field dimensions must be positive");
    }
    double& at(int i, int j) { return v[(size_t)i * n_x + j]; }
    double at(int i, int j) const { return v[(size_t)i * n_x + j]; }
    double* row(int i) { return v.data() + (size_t)i * n_x; }
    const double* row(int i) const { return v.data() + (size_t)i * n_x; }
};

}  // namespace qk
