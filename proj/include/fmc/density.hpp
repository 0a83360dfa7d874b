#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmc/measure.hpp"
#include "fmc/subordination.hpp"

namespace fmc {

struct AtomEntry {
    double c = 0.0;
    double mass = 0.0;
    bool at_zero = false;  // witness "zero" instead of a pair (u, v)
    double u = 0.0;
    double v = 0.0;
};

struct AtomReport {
    std::vector<AtomEntry> entries;
    double total_mass() const;
};

/// Atoms of mu boxtimes nu from the atoms of the factors.
AtomReport atoms(const Measure& mu, const Measure& nu);

struct PointDiagnostic {
    bool ok = true;
    double residual = 0.0;
    double extrapolation_error = 0.0;
    double d_mu = 0.0;  // dist(Omega_nu, supp mu)
    double d_nu = 0.0;  // dist(Omega_mu, supp nu)
    std::string message;
};

struct DensityGrid {
    std::vector<double> xs;
    std::vector<double> fs;
    std::vector<SubordinationState> states;
    std::vector<PointDiagnostic> diagnostics;
    double xf_max = 0.0;
    int failures = 0;
    // support bounds used for tail corrections in mass_check
    double support_lo = 0.0;
    double support_hi = 0.0;
};

struct DensityOptions {
    EpsLadder ladder = EpsLadder::halving();
    /// Known edges (E-, E+). Points within `edge_zone` of them get `deep_rungs` extra halvings.
    std::optional<std::pair<double, double>> edges;
    double edge_zone = 1e-4;
    int deep_rungs = 10;
    /// Test hook: multiplies every density value by (1 + perturbation).
    double perturbation = 0.0;
};

/// f(x) = Im m_rho(x + i0) / pi. Throws ConvergenceError with the ladder
/// diagnostic when the boundary value cannot be established.
double density_at(const Measure& mu, const Measure& nu, double x, const EpsLadder& ladder = EpsLadder::halving());

/// Density on n equispaced points of [lo, hi].
DensityGrid density_grid(const Measure& mu, const Measure& nu, double lo, double hi, int n,
                         const DensityOptions& opt = {});

/// Density on arbitrary sorted positive abscissae.
DensityGrid density_on(const Measure& mu, const Measure& nu, const std::vector<double>& xs,
                       const DensityOptions& opt = {});

struct MassCheck {
    double mass = 0.0;
    double defect = 0.0;
    double continuous_mass = 0.0;
    double atom_mass = 0.0;
};

/// Trapezoid mass of the grid plus power-law tail corrections towards the
/// support bounds at ends where the density has not vanished, plus atoms.
MassCheck mass_check(const DensityGrid& grid, const AtomReport& atoms);

/// Trapezoid integral of g(x) f(x) dx with the same tail model (g smooth).
double grid_integral(const DensityGrid& grid, double (*g)(double, void*), void* ctx);

/// Moments of order 1..k_max from the grid and the atoms.
std::vector<double> grid_moments(const DensityGrid& grid, const AtomReport& atoms, int k_max);

}  // namespace fmc
