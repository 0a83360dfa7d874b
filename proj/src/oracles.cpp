#include "fmc/oracles.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fmc/errors.hpp"

namespace fmc {

namespace {

using Series = std::vector<double>;  // coefficient k of z^k, index 0 unused (zero)

Series mul(const Series& a, const Series& b, int K) {
    Series c(K + 1, 0.0);
    for (int i = 0; i <= K; ++i) {
        if (a[i] == 0.0) continue;
        for (int j = 0; i + j <= K; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

// f(g(z)) truncated at order K; g has no constant term.
Series compose(const Series& f, const Series& g, int K) {
    Series out(K + 1, 0.0);
    Series pw(K + 1, 0.0);
    pw[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
        pw = mul(pw, g, K);
        for (int i = 0; i <= K; ++i) out[i] += f[k] * pw[i];
    }
    return out;
}

// Compositional inverse of f with f(0) = 0, f'(0) != 0.
Series invert(const Series& f, int K) {
    if (f[1] == 0.0) throw DomainError("s_series_moments: zero mean, the S-transform is undefined");
    Series g(K + 1, 0.0);
    g[1] = 1.0 / f[1];
    for (int n = 2; n <= K; ++n) {
        const Series c = compose(f, g, n);
        g[n] = -c[n] / f[1];
    }
    return g;
}

Series chi_of(const std::vector<double>& moments, int K) {
    Series psi(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) psi[k] = moments[k - 1];
    return invert(psi, K);
}

}  // namespace

double bernoulli_square_density(double x) {
    if (!(x > 0.0 && x < 4.0)) return 0.0;
    return 1.0 / (2.0 * std::numbers::pi) * std::sqrt(1.0 / (x * (4.0 - x)));
}

double table_density(const std::string& name, double x) {
    if (name == "marchenko_pastur") {
        if (!(x > 0.0 && x < 4.0)) return 0.0;
        return std::sqrt((4.0 - x) / x) / (2.0 * std::numbers::pi);
    }
    if (name == "fuss_catalan") {
        if (!(x > 0.0 && x < 6.75)) return 0.0;
        const double c2 = std::cbrt(2.0);
        const double s = 27.0 + 3.0 * std::sqrt(81.0 - 12.0 * x);
        return c2 * std::sqrt(3.0) / (12.0 * std::numbers::pi) * (c2 * std::pow(s, 2.0 / 3.0) - 6.0 * std::cbrt(x)) /
               (std::pow(x, 2.0 / 3.0) * std::cbrt(s));
    }
    throw DomainError("table_density: unknown law '" + name + "'");
}

ClosedForm bernoulli_square() {
    ClosedForm c{"bernoulli_square", bernoulli_square_density, {{0.0, 0.5}}, {0.0, 4.0}, {}};
    c.density_from_upper = [](double t) {
        if (!(t > 0.0 && t < 4.0)) return 0.0;
        return 1.0 / (2.0 * std::numbers::pi) / std::sqrt(t * (4.0 - t));
    };
    return c;
}

ClosedForm marchenko_pastur() {
    return {"marchenko_pastur", [](double x) { return table_density("marchenko_pastur", x); }, {}, {0.0, 4.0}, {}};
}

ClosedForm fuss_catalan() {
    return {"fuss_catalan", [](double x) { return table_density("fuss_catalan", x); }, {}, {0.0, 6.75}, {}};
}

double closed_form_mass(const ClosedForm& c) {
    boost::math::quadrature::tanh_sinh<double> q;
    double s = 0.0;
    if (c.density_from_upper) {
        // xc is the signed distance to the nearer endpoint
        const double mid = 0.5 * (c.support.first + c.support.second);
        s = q.integrate(c.density, c.support.first, mid);
        s += q.integrate([&](double x, double xc) { return c.density_from_upper(x > 0.5 * (mid + c.support.second) ? xc : c.support.second - x); },
                         mid, c.support.second);
    } else {
        s = q.integrate(c.density, c.support.first, c.support.second);
    }
    for (const auto& a : c.atoms) s += a.weight;
    return s;
}

std::vector<double> s_series_moments(const std::vector<double>& mu_m, const std::vector<double>& nu_m, int k_max) {
    if (k_max < 1) throw DomainError("s_series_moments: k_max must be positive");
    const int K = k_max + 2;
    if (static_cast<int>(mu_m.size()) < K || static_cast<int>(nu_m.size()) < K) {
        throw DomainError("s_series_moments: not enough input moments");
    }
    Series cm = chi_of(mu_m, K);
    Series cn = chi_of(nu_m, K);
    // chi_rho = chi_mu chi_nu (1 + z) / z; both factors start at z, so order
    // K + 1 of the product only needs their terms up to K
    cm.push_back(0.0);
    cn.push_back(0.0);
    const Series prod = mul(cm, cn, K + 1);
    Series chi(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
        chi[k] = prod[k + 1] + prod[k];
    }
    const Series psi = invert(chi, K);
    return std::vector<double>(psi.begin() + 1, psi.begin() + 1 + k_max);
}

std::vector<double> s_series_moments(const Measure& mu, const Measure& nu, int k_max) {
    if (k_max > 6) throw DomainError("s_series_moments: k_max must be at most 6");
    const int K = k_max + 2;
    std::vector<double> a(K), b(K);
    for (int k = 1; k <= K; ++k) {
        a[k - 1] = mu.moment(k);
        b[k - 1] = nu.moment(k);
    }
    return s_series_moments(a, b, k_max);
}

Comparison compare(const DensityGrid& grid, const ClosedForm& oracle, double exclusion) {
    Comparison c;
    const auto& x = grid.xs;
    double ga = 0.0, oa = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ref = oracle.density(x[i]);
        if (i > 0) {
            const double h = 0.5 * (x[i] - x[i - 1]);
            ga += h * (grid.fs[i] + grid.fs[i - 1]);
            oa += h * (ref + oracle.density(x[i - 1]));
        }
        if (x[i] < oracle.support.first + exclusion || x[i] > oracle.support.second - exclusion) continue;
        if (!(ref > 0.0)) continue;
        c.max_rel_err = std::max(c.max_rel_err, std::abs(grid.fs[i] - ref) / ref);
        ++c.compared;
    }
    c.mass_err = std::abs(ga - oa);
    return c;
}

}  // namespace fmc
