#include "fmc/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fmc/errors.hpp"

namespace fmc {

namespace {

constexpr double kClip = 1e-12;

bool near_atom(const AtomReport& a, double x) {
    for (const auto& e : a.entries)
        if (e.c == x) return true;
    return false;
}

double tail_mass(double x0, double f0, double x1, double f1, double edge) {
    // f ~ C |x - edge|^alpha between the edge and x0
    const double d0 = std::abs(x0 - edge);
    const double d1 = std::abs(x1 - edge);
    if (!(f0 > 0.0) || !(d0 > 0.0)) return 0.0;
    double alpha = 0.0;
    if (f1 > 0.0 && d1 > d0) alpha = std::log(f1 / f0) / std::log(d1 / d0);
    alpha = std::clamp(alpha, -0.95, 4.0);
    return f0 * d0 / (alpha + 1.0);
}

}  // namespace

double AtomReport::total_mass() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.mass;
    return s;
}

AtomReport atoms(const Measure& mu, const Measure& nu) {
    AtomReport r;
    auto mass_at_zero = [](const Measure& m) {
        for (const auto& a : m.atoms())
            if (a.location == 0.0) return a.weight;
        return 0.0;
    };
    const double z0 = std::max(mass_at_zero(mu), mass_at_zero(nu));
    if (z0 > 0.0) r.entries.push_back({0.0, z0, true, 0.0, 0.0});
    for (const auto& a : mu.atoms()) {
        if (a.location == 0.0) continue;
        for (const auto& b : nu.atoms()) {
            if (b.location == 0.0) continue;
            const double s = a.weight + b.weight;
            if (s > 1.0) r.entries.push_back({a.location * b.location, s - 1.0, false, a.location, b.location});
        }
    }
    std::sort(r.entries.begin(), r.entries.end(), [](const AtomEntry& x, const AtomEntry& y) { return x.c < y.c; });
    return r;
}

double density_at(const Measure& mu, const Measure& nu, double x, const EpsLadder& ladder) {
    double err = 0.0;
    const auto s = solve_boundary(mu, nu, x, ladder, {}, &err);
    if (!s.converged) {
        std::ostringstream os;
        os.precision(17);
        os << "density at x = " << x << ": " << s.diagnostic;
        throw ConvergenceError(os.str());
    }
    const double f = s.m_rho.imag() / std::numbers::pi;
    return f < kClip ? 0.0 : f;
}

DensityGrid density_on(const Measure& mu, const Measure& nu, const std::vector<double>& xs,
                       const DensityOptions& opt) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0)) throw DomainError("density grid: abscissae must be positive");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw DomainError("density grid: abscissae must increase");
    }
    DensityGrid g;
    g.xs = xs;
    g.fs.assign(xs.size(), 0.0);
    g.states.resize(xs.size());
    g.diagnostics.resize(xs.size());
    g.support_lo = mu.support_lo() * nu.support_lo();
    g.support_hi = mu.support_hi() * nu.support_hi();
    if (opt.edges) {
        g.support_lo = opt.edges->first;
        g.support_hi = opt.edges->second;
    }
    const AtomReport at = atoms(mu, nu);

    EpsLadder deep = opt.ladder;
    for (int k = 0; k < opt.deep_rungs; ++k) deep.eps.push_back(deep.eps.back() * 0.5);

    std::optional<cplx> seed;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        auto& d = g.diagnostics[i];
        if (near_atom(at, x)) {
            d.ok = false;
            d.message = "abscissa is an atom of the convolution";
            ++g.failures;
            continue;
        }
        bool near_edge = false;
        if (opt.edges) {
            near_edge = std::abs(x - opt.edges->first) < opt.edge_zone || std::abs(x - opt.edges->second) < opt.edge_zone;
        }
        double err = 0.0;
        SubordinationState s;
        try {
            s = solve_boundary(mu, nu, x, near_edge ? deep : opt.ladder, seed, &err);
        } catch (const std::exception& ex) {
            s.z = x;
            s.converged = false;
            s.diagnostic = ex.what();
        }
        d.extrapolation_error = err;
        d.residual = s.residual;
        if (!s.converged) {
            d.ok = false;
            d.message = s.diagnostic;
            ++g.failures;
            g.states[i] = std::move(s);
            continue;
        }
        if (s.omega_mu.imag() > 0.0) seed = s.omega_mu;
        const auto [dm, dn] = stability_check(s, mu, nu);
        d.d_mu = dm;
        d.d_nu = dn;
        double f = s.m_rho.imag() / std::numbers::pi;
        if (f < -kClip) {
            std::ostringstream os;
            os.precision(17);
            os << "negative density " << f << " clipped";
            d.message = os.str();
        }
        if (f < kClip) f = 0.0;
        f *= 1.0 + opt.perturbation;
        g.fs[i] = f;
        g.xf_max = std::max(g.xf_max, x * f);
        g.states[i] = std::move(s);
    }
    return g;
}

DensityGrid density_grid(const Measure& mu, const Measure& nu, double lo, double hi, int n,
                         const DensityOptions& opt) {
    if (!(lo > 0.0) || !(lo < hi)) throw DomainError("density grid: need 0 < lo < hi");
    if (n < 2) throw DomainError("density grid: need at least two points");
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    xs.back() = hi;
    return density_on(mu, nu, xs, opt);
}

double grid_integral(const DensityGrid& g, double (*fn)(double, void*), void* ctx) {
    const auto& x = g.xs;
    const auto& f = g.fs;
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        s += 0.5 * (x[i] - x[i - 1]) * (fn(x[i - 1], ctx) * f[i - 1] + fn(x[i], ctx) * f[i]);
    }
    if (f[0] > 0.0 && g.support_lo < x[0]) {
        s += fn(x[0], ctx) * tail_mass(x[0], f[0], x[1], f[1], g.support_lo);
    }
    if (f[n - 1] > 0.0 && g.support_hi > x[n - 1]) {
        s += fn(x[n - 1], ctx) * tail_mass(x[n - 1], f[n - 1], x[n - 2], f[n - 2], g.support_hi);
    }
    return s;
}

MassCheck mass_check(const DensityGrid& grid, const AtomReport& atoms) {
    MassCheck r;
    r.continuous_mass = grid_integral(grid, [](double, void*) { return 1.0; }, nullptr);
    r.atom_mass = atoms.total_mass();
    r.mass = r.continuous_mass + r.atom_mass;
    r.defect = std::abs(r.mass - 1.0);
    return r;
}

std::vector<double> grid_moments(const DensityGrid& grid, const AtomReport& atoms, int k_max) {
    std::vector<double> m(k_max);
    for (int k = 1; k <= k_max; ++k) {
        int kk = k;
        double s = grid_integral(grid, [](double x, void* c) { return std::pow(x, *static_cast<int*>(c)); }, &kk);
        for (const auto& a : atoms.entries) s += a.mass * std::pow(a.c, k);
        m[k - 1] = s;
    }
    return m;
}

}  // namespace fmc
