// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

namespace fene {

// Adaptive Gauss-Legendre integration on [a, b]. Each panel is integrated
// with a 15-point rule; a panel is split until it agrees with its two
// halves within the requested tolerance. Panels are processed in a fixed
// left-to-right order.
double adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-10, double abs_tol = 1e-14,
                               int max_depth = 48);

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre_rule(int n, double* nodes, double* weights);

} // namespace fene
