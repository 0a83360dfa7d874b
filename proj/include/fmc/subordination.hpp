#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmc/measure.hpp"
#include "fmc/transforms.hpp"

namespace fmc {

struct SubordinationState {
    cplx z;
    cplx omega_mu;  // Omega_mu(z)
    cplx omega_nu;  // Omega_nu(z)
    cplx M_rho;
    cplx m_rho;
    double residual = 0.0;  // max of the two raw equation defects, or the extrapolation error on the boundary
    int iters = 0;
    bool converged = false;
    std::string diagnostic;
};

struct EpsLadder {
    std::vector<double> eps;  // strictly decreasing
    int extrapolation_order = 2;

    /// eps_k = start / 2^k for k < rungs.
    static EpsLadder halving(double start = 1e-2, int rungs = 14);
};

struct SolverOptions {
    int max_fixed_point = 500;
    int max_newton = 20;
    double tol = 1e-12;
};

/// Solves the subordination system at z in the upper half-plane. `init` is a
/// starting value for Omega_mu, typically a neighbor's solution. Throws
/// ConvergenceError when no state meets the residual contract.
SubordinationState solve_point(const Measure& mu, const Measure& nu, cplx z, std::optional<cplx> init = {},
                               const SolverOptions& opt = {});

/// Same as solve_point but reports failure in the returned state.
SubordinationState try_solve_point(const Measure& mu, const Measure& nu, cplx z, std::optional<cplx> init = {},
                                   const SolverOptions& opt = {});

/// States at x + i eps along xs, each seeded by its predecessor.
std::vector<SubordinationState> solve_grid(const Measure& mu, const Measure& nu, const std::vector<double>& xs,
                                           double eps);

/// Boundary values at x + i0 from the eps ladder, polynomial extrapolation
/// to eps = 0, and a Newton polish on the real axis when it is safe.
/// `extrapolation_error` receives the ladder error estimate.
SubordinationState solve_boundary(const Measure& mu, const Measure& nu, double x, const EpsLadder& ladder,
                                  std::optional<cplx> init = {}, double* extrapolation_error = nullptr);

/// (dist(omega_nu, supp mu), dist(omega_mu, supp nu)).
std::pair<double, double> stability_check(const SubordinationState& s, const Measure& mu, const Measure& nu);

/// Residuals (|M_mu(omega_nu) - M_nu(omega_mu)|, |omega_mu omega_nu - z M_rho|) recomputed from scratch.
std::pair<double, double> equation_residuals(const Measure& mu, const Measure& nu, cplx z, cplx omega_mu,
                                             cplx omega_nu);

/// Subordination functions in the reciprocal convention: omega(w) = 1/Omega(1/w).
std::pair<cplx, cplx> omega_reciprocal(const Measure& mu, const Measure& nu, cplx w);

/// m of the convolution from its M-transform.
cplx m_from_M(cplx z, cplx M);

}  // namespace fmc
