#include "fmc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fmc/errors.hpp"
#include "fmc/quadrature.hpp"

namespace fmc {

namespace {

constexpr double kMassTolerance = 1e-9;

void check_component_domain(double lo, double hi, double t_lo, double t_hi) {
    if (!(lo >= 0.0)) throw DomainError("jacobi component: lo must be >= 0");
    if (!(lo < hi) || !std::isfinite(hi)) throw DomainError("jacobi component: need lo < hi < inf");
    if (!(t_lo > -1.0 && t_lo < 1.0) || !(t_hi > -1.0 && t_hi < 1.0)) {
        throw DomainError("jacobi component: exponents must lie in (-1, 1)");
    }
}

double component_moment(const JacobiComponent& c, int k) {
    const int n = std::max(8, k / 2 + 2);
    const auto rule = cached_gauss_jacobi(n, c.alpha(), c.beta());
    const double h = c.half_width();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule->weights[i] * std::pow(c.center() + h * rule->nodes[i], k);
    return c.norm_const * std::pow(h, c.t_lo + c.t_hi + 1.0) * sum;
}

}  // namespace

double JacobiComponent::density(double x) const {
    if (x <= lo || x >= hi) return 0.0;
    return norm_const * std::pow(x - lo, t_lo) * std::pow(hi - x, t_hi);
}

JacobiComponent make_component(double lo, double hi, double t_lo, double t_hi, double weight) {
    check_component_domain(lo, hi, t_lo, t_hi);
    if (!(weight > 0.0 && weight <= 1.0 + kMassTolerance)) {
        throw DomainError("jacobi component: weight must lie in (0, 1]");
    }
    JacobiComponent c{lo, hi, t_lo, t_hi, weight, 1.0};
    const double h = c.half_width();
    c.norm_const = weight / (std::pow(h, t_lo + t_hi + 1.0) * jacobi_weight_mass(c.alpha(), c.beta()));
    return c;
}

Measure::Measure(std::vector<Atom> atoms, std::vector<JacobiComponent> components)
    : atoms_(std::move(atoms)), components_(std::move(components)) {
    for (const auto& a : atoms_) {
        if (!(a.location >= 0.0) || !std::isfinite(a.location)) throw DomainError("atom location must be >= 0");
        if (!(a.weight > 0.0)) throw DomainError("atom weight must be > 0");
    }
    for (const auto& c : components_) check_component_domain(c.lo, c.hi, c.t_lo, c.t_hi);
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
    std::sort(components_.begin(), components_.end(),
              [](const JacobiComponent& a, const JacobiComponent& b) { return a.lo < b.lo; });
    mean_ = moment(1);
    variance_ = moment(2) - mean_ * mean_;
}

double Measure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    for (const auto& c : components_) s += c.weight;
    return s;
}

double Measure::moment(int k) const {
    if (k < 0) throw DomainError("moment order must be >= 0");
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * std::pow(a.location, k);
    for (const auto& c : components_) s += component_moment(c, k);
    return s;
}

double Measure::support_lo() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) lo = std::min(lo, a.location);
    for (const auto& c : components_) lo = std::min(lo, c.lo);
    return lo;
}

double Measure::support_hi() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) hi = std::max(hi, a.location);
    for (const auto& c : components_) hi = std::max(hi, c.hi);
    return hi;
}

bool Measure::is_point_mass() const { return components_.empty() && atoms_.size() == 1; }

bool Measure::is_zero_point_mass() const { return is_point_mass() && atoms_.front().location == 0.0; }

double Measure::distance_to_support(std::complex<double> z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) d = std::min(d, std::abs(z - a.location));
    for (const auto& c : components_) {
        const double x = std::clamp(z.real(), c.lo, c.hi);
        d = std::min(d, std::abs(z - x));
    }
    return d;
}

bool Measure::on_support(double x) const {
    for (const auto& a : atoms_)
        if (x == a.location) return true;
    for (const auto& c : components_)
        if (x >= c.lo && x <= c.hi) return true;
    return false;
}

double Measure::density(double x) const {
    double f = 0.0;
    for (const auto& c : components_) f += c.density(x);
    return f;
}

Measure make_jacobi(double lo, double hi, double t_lo, double t_hi) {
    return Measure({}, {make_component(lo, hi, t_lo, t_hi, 1.0)});
}

Measure point_mass(double location) { return Measure({Atom{location, 1.0}}, {}); }

MeasureStats measure_stats(const Measure& m) {
    MeasureStats s;
    for (int k = 1; k <= 6; ++k) s.moments[k - 1] = m.moment(k);
    s.mean = s.moments[0];
    s.variance = s.moments[1] - s.mean * s.mean;
    return s;
}

Measure dilate(const Measure& m, double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("dilate: factor must be positive");
    std::vector<Atom> atoms;
    for (const auto& at : m.atoms()) atoms.push_back({a * at.location, at.weight});
    std::vector<JacobiComponent> comps;
    for (const auto& c : m.components()) comps.push_back(make_component(a * c.lo, a * c.hi, c.t_lo, c.t_hi, c.weight));
    return Measure(std::move(atoms), std::move(comps));
}

ValidationReport validate(const Measure& m) {
    ValidationReport r;
    auto fail = [&r](std::string msg) {
        r.valid = false;
        r.violations.push_back(std::move(msg));
    };

    const double mass = m.total_mass();
    if (std::abs(mass - 1.0) > kMassTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "mass: total weight " << mass << " differs from 1";
        fail(os.str());
    }
    const auto& atoms = m.atoms();
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        if (atoms[i].location == atoms[i - 1].location) fail("atoms: duplicate location");
    }
    for (const auto& a : atoms) {
        if (a.weight > 1.0 + kMassTolerance) fail("atoms: weight exceeds 1");
    }
    for (const auto& c : m.components()) {
        if (c.weight > 1.0 + kMassTolerance) fail("jacobi: weight exceeds 1");
        if (c.lo < 0.0) fail("jacobi: support extends below 0");
    }
    if (atoms.empty() && m.components().empty()) fail("empty measure");
    if (m.is_zero_point_mass()) fail("measure is the point mass at 0");

    r.edge_machinery = r.valid && atoms.empty() && m.components().size() == 1 && m.components().front().lo > 0.0;
    r.mean_one = std::abs(m.mean() - 1.0) <= 1e-12;
    return r;
}

void require_valid(const Measure& m, const std::string& context) {
    const auto r = validate(m);
    if (r.valid) return;
    std::string msg = context + ": invalid measure";
    for (const auto& v : r.violations) msg += "; " + v;
    throw DomainError(msg);
}

}  // namespace fmc
