#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace fmc {

/// Gauss-Jacobi rule on [-1, 1] for the weight (1 - t)^alpha (1 + t)^beta.
struct GaussJacobiRule {
    int n = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;  // sum to jacobi_weight_mass(alpha, beta)
};

/// Integral of (1 - t)^alpha (1 + t)^beta over [-1, 1].
double jacobi_weight_mass(double alpha, double beta);

/// Builds an n-point rule with the Golub-Welsch method. The tridiagonal
/// eigenproblem is solved by implicit QL while tracking only the first
/// eigenvector component, so the cost is O(n^2).
GaussJacobiRule gauss_jacobi(int n, double alpha, double beta);

/// Shared, thread-safe cache of rules keyed by (n, alpha, beta).
std::shared_ptr<const GaussJacobiRule> cached_gauss_jacobi(int n, double alpha, double beta);

/// Bernstein ellipse parameter rho > 1 of the smallest ellipse with foci
/// +-1 passing through t. Gauss rules converge like rho^(-2n) for
/// integrands analytic inside it.
double bernstein_rho(std::complex<double> t);

}  // namespace fmc
