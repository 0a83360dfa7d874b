#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fmc/errors.hpp"
#include "fmc/measure.hpp"
#include "fmc/subordination.hpp"
#include "fmc/transforms.hpp"

using namespace fmc;

namespace {

Measure bern() { return Measure({{0.0, 0.5}, {2.0, 0.5}}, {}); }
Measure jac_a() { return make_jacobi(1.0, 3.0, 0.5, -0.5); }
Measure jac_b() { return make_jacobi(0.5, 2.0, 0.0, 0.3); }
Measure mixed() { return Measure({{0.5, 0.3}}, {make_component(1.0, 2.5, -0.3, 0.4, 0.7)}); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<cplx> random_upper(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-2.0, 12.0), lim(-3.0, 1.0);
    std::vector<cplx> out;
    for (int i = 0; i < n; ++i) out.emplace_back(re(rng), std::pow(10.0, lim(rng)));
    return out;
}

}  // namespace

TEST_CASE("identity element") {
    const auto d1 = point_mass(1.0);
    const cplx z(0.7, 0.4);
    const auto s = solve_point(d1, d1, z);
    CHECK(rel(s.omega_mu, z) < 1e-13);
    CHECK(rel(s.omega_nu, z) < 1e-13);

    // mu boxtimes delta_a is mu dilated by a; the argument of M_mu is z / a
    const double a = 2.5;
    for (cplx w : {cplx(3.0, 0.2), cplx(-1.0, 1.0), cplx(6.0, 1e-2)}) {
        const auto t = solve_point(jac_a(), point_mass(a), w);
        CHECK(rel(t.omega_nu, w / a) < 1e-12);
        CHECK(rel(t.M_rho, M_value(jac_a(), w / a)) < 1e-12);
    }
}

TEST_CASE("Bernoulli square in closed form") {
    // M_b(w) = w - 1, so Omega = Omega_mu = Omega_nu solves Omega^2 = z (Omega - 1)
    for (cplx z : {cplx(2.0, 0.01), cplx(0.5, 1.0), cplx(3.9, 0.2), cplx(7.0, 0.5)}) {
        const cplx r = std::sqrt(z * z - 4.0 * z);
        cplx om = (z + r) / 2.0;
        if (om.imag() < z.imag()) om = (z - r) / 2.0;
        const auto s = solve_point(bern(), bern(), z);
        CHECK(rel(s.omega_mu, om) < 1e-12);
        CHECK(rel(s.omega_nu, om) < 1e-12);
        CHECK(rel(s.M_rho, om - 1.0) < 1e-12);
        // atom 1/2 at zero plus half an arcsine law on [0, 4]
        const cplx m = -0.5 / z - 0.5 / (std::sqrt(z) * std::sqrt(z - 4.0));
        CHECK(rel(s.m_rho, m) < 1e-11);
    }
}

TEST_CASE("residual contract and invariants on random points") {
    const std::vector<std::pair<Measure, Measure>> pairs = {
        {jac_a(), jac_a()}, {jac_b(), jac_a()}, {mixed(), jac_b()}, {bern(), jac_a()}};
    for (const auto& [mu, nu] : pairs) {
        for (cplx z : random_upper(60, 7)) {
            const auto s = solve_point(mu, nu, z);
            REQUIRE(s.converged);
            const auto [r1, r2] = equation_residuals(mu, nu, z, s.omega_mu, s.omega_nu);
            CHECK(r1 <= 1e-12 * (1.0 + std::abs(z)));
            CHECK(r2 <= 1e-12 * (1.0 + std::norm(z)));
            CHECK(s.omega_mu.imag() > 0.0);
            CHECK(s.omega_nu.imag() > 0.0);
            // subordination functions do not decrease the argument
            CHECK(std::arg(s.omega_mu) >= std::arg(z) - 1e-12);
            CHECK(std::arg(s.omega_nu) >= std::arg(z) - 1e-12);
            CHECK(rel(s.m_rho, m_from_M(z, s.M_rho)) < 1e-14);
        }
    }
}

TEST_CASE("swap symmetry") {
    for (cplx z : random_upper(20, 11)) {
        const auto s = solve_point(jac_b(), mixed(), z);
        const auto t = solve_point(mixed(), jac_b(), z);
        CHECK(rel(s.omega_mu, t.omega_nu) < 1e-10);
        CHECK(rel(s.omega_nu, t.omega_mu) < 1e-10);
        CHECK(rel(s.m_rho, t.m_rho) < 1e-10);
    }
}

TEST_CASE("large z asymptotics") {
    // M(w) ~ w / m_1 at infinity, hence Omega_nu(z) ~ z / m_1(nu)
    const auto mu = jac_b(), nu = mixed();
    for (cplx z : {cplx(0.0, 1e6), cplx(-1e6, 1e5), cplx(1e6, 1e6)}) {
        const auto s = solve_point(mu, nu, z);
        CHECK(std::abs(s.omega_nu * nu.mean() / z - 1.0) < 1e-4);
        CHECK(std::abs(s.omega_mu * mu.mean() / z - 1.0) < 1e-4);
    }
}

TEST_CASE("grid sweeps agree in both directions") {
    std::vector<double> xs;
    for (int i = 0; i < 80; ++i) xs.push_back(0.5 + 0.12 * i);
    std::vector<double> rev(xs.rbegin(), xs.rend());
    const auto f = solve_grid(jac_a(), jac_b(), xs, 1e-3);
    const auto b = solve_grid(jac_a(), jac_b(), rev, 1e-3);
    REQUIRE(f.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto& g = b[xs.size() - 1 - i];
        CHECK(rel(f[i].omega_mu, g.omega_mu) < 1e-10);
        CHECK(rel(f[i].m_rho, g.m_rho) < 1e-10);
    }
    const auto one = solve_grid(jac_a(), jac_b(), {xs[5]}, 1e-3);
    CHECK(rel(one[0].m_rho, solve_point(jac_a(), jac_b(), {xs[5], 1e-3}).m_rho) < 1e-12);
}

TEST_CASE("boundary values") {
    const auto ladder = EpsLadder::halving();
    // uniform on [1, 3] has density 1/2
    const auto u = make_jacobi(1.0, 3.0, 0.0, 0.0);
    const auto s = solve_boundary(u, point_mass(1.0), 2.0, ladder);
    CHECK(s.m_rho.imag() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-8));

    const auto t = solve_boundary(bern(), bern(), 2.0, ladder);
    CHECK(t.m_rho.imag() == doctest::Approx(0.25).epsilon(1e-9));

    for (double x : {0.5, 9.0, 9.5}) {
        const auto o = solve_boundary(jac_a(), jac_a(), x, ladder);
        CHECK(std::abs(o.m_rho.imag()) <= 1e-9);
    }
}

TEST_CASE("stability distances") {
    const auto d1 = point_mass(1.0);
    const cplx z(3.0, 1.0);
    const auto s = solve_point(d1, d1, z);
    const auto [a, b] = stability_check(s, d1, d1);
    CHECK(a == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(b == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

    // inside the support of a conforming pair the distances stay positive
    const auto ladder = EpsLadder::halving();
    for (int i = 1; i < 20; ++i) {
        const double x = 2.05 + (8.73 - 2.05) * i / 20.0;
        const auto o = solve_boundary(jac_a(), jac_a(), x, ladder);
        const auto [da, db] = stability_check(o, jac_a(), jac_a());
        CHECK(da > 1e-3);
        CHECK(db > 1e-3);
    }
}

TEST_CASE("reciprocal convention") {
    const cplx w(0.2, 0.3);
    const auto [om, on] = omega_reciprocal(jac_a(), jac_b(), w);
    // 1/w is in the lower half-plane, where Omega(conj z) = conj Omega(z)
    const auto s = solve_point(jac_a(), jac_b(), std::conj(1.0 / w));
    CHECK(rel(om, 1.0 / std::conj(s.omega_mu)) < 1e-12);
    CHECK(rel(on, 1.0 / std::conj(s.omega_nu)) < 1e-12);
    CHECK(om.imag() > 0.0);
}

TEST_CASE("zero point mass is rejected") {
    CHECK_THROWS_AS(solve_point(point_mass(0.0), jac_a(), {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(solve_point(jac_a(), point_mass(0.0), {1.0, 1.0}), DomainError);
}

namespace {

Measure mean_one(double lo, double hi, double tl, double th) {
    const double m = make_jacobi(lo, hi, tl, th).mean();
    return make_jacobi(lo / m, hi / m, tl, th);
}

}  // namespace

TEST_CASE("variance asymptotics for mean-one inputs") {
    const auto mu = mean_one(1.0, 3.0, 0.5, -0.5), nu = mean_one(0.5, 2.0, 0.0, 0.3);
    const cplx z(0.0, 1e4);
    const auto s = solve_point(mu, nu, z);
    // M(z) = z - Var + O(1/z), and M_mu(omega_nu) = M_rho with Var rho = Var mu + Var nu
    CHECK(std::abs((s.omega_mu - z) + mu.variance()) <= 1e-2 * mu.variance());
    CHECK(std::abs((s.omega_nu - z) + nu.variance()) <= 1e-2 * nu.variance());
}

TEST_CASE("Ihat cross identity and product bound") {
    const std::vector<std::pair<Measure, Measure>> pairs = {{jac_a(), jac_b()}, {mixed(), jac_a()}, {bern(), bern()}};
    for (const auto& [mu, nu] : pairs) {
        for (cplx z : random_upper(40, 3)) {
            const auto s = solve_point(mu, nu, z);
            const double ih_mu = m_transform(mu, s.omega_nu).Ihat;
            const double ih_nu = m_transform(nu, s.omega_mu).Ihat;
            CHECK(std::abs((s.omega_mu / z).imag() - ih_mu * s.omega_nu.imag()) <=
                  1e-10 * std::max(1.0, std::abs((s.omega_mu / z).imag())));
            CHECK(std::norm(z) * ih_mu * ih_nu <= 1.0 + 1e-10);
        }
    }
}
