#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fmc/density.hpp"
#include "fmc/measure.hpp"

namespace fmc {

struct ClosedForm {
    std::string name;
    std::function<double(double)> density;
    std::vector<Atom> atoms;
    std::pair<double, double> support;
    /// Density as a function of the distance to support.second; set when the
    /// density is singular there, so quadrature does not lose the tail to rounding.
    std::function<double(double)> density_from_upper;
};

/// Density of the absolutely continuous part of b boxtimes b for
/// b = (delta_0 + delta_2)/2; the atom (0, 1/2) is carried separately.
double bernoulli_square_density(double x);

/// "marchenko_pastur" or "fuss_catalan".
double table_density(const std::string& name, double x);

ClosedForm bernoulli_square();
ClosedForm marchenko_pastur();
ClosedForm fuss_catalan();

/// Atom mass plus the tanh-sinh integral of the density over the support.
double closed_form_mass(const ClosedForm& c);

/// Moments 1..k_max of mu boxtimes nu from the product of S-transforms,
/// by truncated power-series arithmetic.
std::vector<double> s_series_moments(const Measure& mu, const Measure& nu, int k_max);

/// Same, from raw moment sequences m_1..m_K (K >= k_max).
std::vector<double> s_series_moments(const std::vector<double>& mu_moments, const std::vector<double>& nu_moments,
                                     int k_max);

struct Comparison {
    double max_rel_err = 0.0;
    double mass_err = 0.0;
    int compared = 0;
};

/// Pointwise relative error on grid points farther than `exclusion` from the
/// oracle support ends, and the difference of the two trapezoid masses on
/// the grid nodes.
Comparison compare(const DensityGrid& grid, const ClosedForm& oracle, double exclusion);

}  // namespace fmc
