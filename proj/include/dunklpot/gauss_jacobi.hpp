#pragma once

#include <vector>

namespace dunklpot {

struct QuadratureRule {
    std::vector<double> nodes;    ///< ascending, in (-1, 1)
    std::vector<double> weights;  ///< for the weight (1-t)^alpha (1+t)^beta
};

/// n-point Gauss-Jacobi rule (Golub-Welsch); cached per (n, alpha, beta).
const QuadratureRule& gauss_jacobi(int n, double alpha, double beta);

}  // namespace dunklpot
