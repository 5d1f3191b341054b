// Small Gaussian quadrature rules shared by the kernel and constants code.
#pragma once

#include <vector>

namespace qk {

// Gauss-Legendre nodes and weights on [0,1] (weights sum to 1).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Gauss-Hermite nodes and weights for the weight exp(-x^2) on the whole
// line (weights sum to sqrt(pi)); nodes are symmetric about zero.
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace qk
