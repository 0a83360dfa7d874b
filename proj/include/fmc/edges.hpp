#pragma once

#include <array>
#include <utility>

#include "fmc/measure.hpp"
#include "fmc/transforms.hpp"

namespace fmc {

/// Support endpoints of mu boxtimes nu and the square-root data at both ends.
/// Pairs are ordered (E-, E+).
struct SupportInfo {
    double E_minus = 0.0;
    double E_plus = 0.0;
    std::pair<double, double> omega_mu_at;
    std::pair<double, double> omega_nu_at;
    std::pair<double, double> gamma_mu;
    std::pair<double, double> gamma_nu;
    std::pair<double, double> residuals;  // |f(E) - 1| at both edges
    std::pair<double, double> z_second;   // second derivative of the inverse map at both edges (mean-1 frame)
    std::pair<double, double> scan_edges; // density-positivity detector
    double mean_mu = 1.0;
    double mean_nu = 1.0;
};

/// f(E) = E^2 Ihat_mu(Omega_nu(E)) Ihat_nu(Omega_mu(E)) from real boundary
/// values. Throws DomainError when E is inside the support.
double edge_function(const Measure& mu, const Measure& nu, double E);

/// Both edges by bisection on f = 1 in the subordination variable, cross
/// validated against a density-positivity scan. Throws StructureError when
/// the inputs are outside the single-interval class or the detectors disagree.
SupportInfo find_support(const Measure& mu, const Measure& nu);

/// Fills gamma_mu, gamma_nu and z_second. Throws StructureError on a
/// degenerate edge.
SupportInfo sqrt_coefficients(const Measure& mu, const Measure& nu, SupportInfo info);

/// find_support followed by sqrt_coefficients.
SupportInfo analyze_edges(const Measure& mu, const Measure& nu);

/// Half-width of the near-edge windows.
double near_edge_window(const SupportInfo& info);

/// Square-root model of the density inside the window of either edge
/// (zero outside the support). Throws DomainError elsewhere.
double near_edge_density(const SupportInfo& info, const Measure& mu, const Measure& nu, double x);

}  // namespace fmc
