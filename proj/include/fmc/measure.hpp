#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace fmc {

struct Atom {
    double location = 0.0;
    double weight = 0.0;
};

/// Absolutely continuous piece weight * C (x - lo)^t_lo (hi - x)^t_hi on
/// [lo, hi], with C chosen so the piece integrates to `weight`.
struct JacobiComponent {
    double lo = 0.0;
    double hi = 1.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double weight = 1.0;
    double norm_const = 1.0;

    double density(double x) const;
    /// Gauss-Jacobi exponent at +1 of the reference interval (the hi end).
    double alpha() const { return t_hi; }
    /// Gauss-Jacobi exponent at -1 of the reference interval (the lo end).
    double beta() const { return t_lo; }
    double center() const { return 0.5 * (lo + hi); }
    double half_width() const { return 0.5 * (hi - lo); }
};

JacobiComponent make_component(double lo, double hi, double t_lo, double t_hi, double weight);

/// Probability measure on [0, inf) made of atoms and Jacobi components.
/// Immutable after construction. Per-entry domain checks throw DomainError;
/// global properties (mass, distinct atoms) are reported by validate().
class Measure {
public:
    Measure() = default;
    Measure(std::vector<Atom> atoms, std::vector<JacobiComponent> components);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<JacobiComponent>& components() const { return components_; }

    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double total_mass() const;

    /// Raw moment of order k computed on demand (exact for atoms, exact
    /// Gauss-Jacobi for components).
    double moment(int k) const;

    /// Smallest and largest points of the support.
    double support_lo() const;
    double support_hi() const;

    bool is_point_mass() const;
    bool is_zero_point_mass() const;

    /// Distance from a complex point to the closed support.
    double distance_to_support(std::complex<double> z) const;
    /// True when the real point x lies on the support (an atom or a closed interval).
    bool on_support(double x) const;

    /// Density of the absolutely continuous part at x.
    double density(double x) const;

private:
    std::vector<Atom> atoms_;
    std::vector<JacobiComponent> components_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

/// Unit-mass Jacobi measure C (x - lo)^t_lo (hi - x)^t_hi on [lo, hi].
Measure make_jacobi(double lo, double hi, double t_lo, double t_hi);

Measure point_mass(double location);

struct MeasureStats {
    double mean = 0.0;
    double variance = 0.0;
    std::array<double, 6> moments{};  // orders 1..6
};

MeasureStats measure_stats(const Measure& m);

/// Pushforward under x -> a x.
Measure dilate(const Measure& m, double a);

struct ValidationReport {
    bool valid = true;
    std::vector<std::string> violations;
    /// No atoms, one component, support inside (0, inf). Mean 1 is reached by
    /// rescaling, so it is reported separately and not required.
    bool edge_machinery = false;
    bool mean_one = false;
};

ValidationReport validate(const Measure& m);

/// Throws DomainError carrying the violations when validate() fails.
void require_valid(const Measure& m, const std::string& context);

}  // namespace fmc
