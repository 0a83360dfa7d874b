#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fmc/errors.hpp"
#include "fmc/measure.hpp"
#include "fmc/transforms.hpp"
#include "reference_quadrature.hpp"

using namespace fmc;

namespace {

const cplx I1(0.0, 1.0);

Measure two_point() { return Measure({{0.0, 0.5}, {2.0, 0.5}}, {}); }
Measure mp() { return make_jacobi(0.0, 4.0, -0.5, 0.5); }

std::vector<Measure> test_measures() {
    return {mp(),
            make_jacobi(1.0, 3.0, 0.0, 0.0),
            make_jacobi(1.0, 3.0, 0.5, -0.5),
            make_jacobi(0.5, 2.0, 0.0, 0.3),
            two_point(),
            Measure({{0.5, 0.3}}, {make_component(1.0, 2.5, -0.3, 0.4, 0.7)})};
}

// m for the standard Marchenko-Pastur law solves z m^2 + z m + 1 = 0
cplx mp_closed_form(cplx z) {
    const cplx r = std::sqrt(z * z - 4.0 * z);
    const cplx a = (-z + r) / (2.0 * z);
    const cplx b = (-z - r) / (2.0 * z);
    if (z.imag() != 0.0) return a.imag() * z.imag() > 0 ? a : b;
    // real z off the support: the branch that behaves like -1/z
    return std::abs(a + 1.0 / z) < std::abs(b + 1.0 / z) ? a : b;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("stieltjes of atoms") {
    CHECK(rel(stieltjes(point_mass(1.0), I1)[0], {0.5, 0.5}) < 1e-15);
    CHECK(rel(stieltjes(two_point(), {1.0, 1.0})[0], {0.0, 0.5}) < 1e-15);
    CHECK(rel(m_transform(two_point(), {1.0, 1.0}).M, I1) < 1e-15);
}

TEST_CASE("Marchenko-Pastur Stieltjes transform") {
    const auto m = mp();
    const cplx z(-1.0, 0.0);
    const cplx got = stieltjes(m, z)[0];
    CHECK(rel(got, mp_closed_form(z)) < 1e-13);
    CHECK(rel(got, ref::stieltjes(m, z)) < 1e-12);
    CHECK(got.real() == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-13));
    for (cplx zz : {cplx(2.0, 0.5), cplx(5.0, 0.1), cplx(0.5, 2.0), cplx(3.9, 1e-3), cplx(6.0, 0.0)}) {
        CHECK(rel(stieltjes(m, zz)[0], mp_closed_form(zz)) < 1e-11);
    }
}

TEST_CASE("point mass M is linear") {
    for (double a : {0.5, 1.0, 3.0}) {
        for (cplx z : {cplx(1.0, 1.0), cplx(-2.0, 0.0), cplx(0.3, -0.7)}) {
            const auto v = m_transform(point_mass(a), z);
            CHECK(rel(v.M, z / a) < 1e-14);
            CHECK(rel(v.Mp, 1.0 / a) < 1e-14);
            CHECK(std::abs(v.Mpp) < 1e-14);
            const auto [eta, psi] = eta_psi(point_mass(a), z);
            CHECK(rel(eta, a * z) < 1e-14);
            (void)psi;
        }
    }
}

TEST_CASE("eta and psi identity") {
    const auto [eta, psi] = eta_psi(mp(), {-0.1, 0.0});
    CHECK(std::abs(eta - (1.0 - 1.0 / (psi + 1.0))) < 1e-12);
    for (const auto& m : test_measures()) {
        for (cplx z : {cplx(0.2, 0.3), cplx(-1.0, 0.5)}) {
            const auto [e, p] = eta_psi(m, z);
            CHECK(std::abs(e - (1.0 - 1.0 / (p + 1.0))) < 1e-12);
            // psi as a moment integral
            const cplx pr = ref::integrate_complex(m, [&](double x) { return x / (1.0 / z - x); });
            CHECK(rel(p, pr) < 1e-11);
        }
    }
}

TEST_CASE("large imaginary part recovers the variance") {
    for (const auto& m : test_measures()) {
        if (std::abs(m.mean() - 1.0) > 1e-12) continue;
        const cplx z(0.0, 1e4);
        const auto v = m_transform(m, z);
        CHECK(std::abs(v.M - z + m.variance()) <= 1e-3 * std::max(1.0, m.variance()));
    }
}

TEST_CASE("self-map and conjugate symmetry") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-3.0, 8.0), ly(-2.0, 1.0);
    for (const auto& m : test_measures()) {
        for (int i = 0; i < 1000; ++i) {
            const cplx z(ux(rng), std::pow(10.0, ly(rng)));
            const auto v = m_transform(m, z);
            REQUIRE((v.M / z).imag() > 0.0);
            CHECK(v.Ihat >= 0.0);
            if (i % 50 == 0) {
                const auto c = m_transform(m, std::conj(z));
                CHECK(std::abs(c.M - std::conj(v.M)) <= 1e-14 * std::abs(v.M));
                CHECK(std::abs(c.m - std::conj(v.m)) <= 1e-14 * std::abs(v.m));
            }
        }
    }
}

TEST_CASE("derivatives agree with central differences") {
    const double h = 1e-5;
    for (const auto& m : test_measures()) {
        for (cplx z : {cplx(1.5, 0.8), cplx(-0.7, 0.2), cplx(5.0, 0.5), cplx(-0.5, 0.0)}) {
            const auto v = m_transform(m, z);
            const cplx Mp = (M_value(m, z + h) - M_value(m, z - h)) / (2.0 * h);
            const cplx Mpp = (m_transform(m, z + h).Mp - m_transform(m, z - h).Mp) / (2.0 * h);
            CHECK(std::abs(v.Mp - Mp) <= 1e-6 * std::abs(v.Mp));
            CHECK(std::abs(v.Mpp - Mpp) <= 1e-6 * std::max(std::abs(v.Mpp), 1e-3));
            const cplx m1 = (stieltjes(m, z + h)[0] - stieltjes(m, z - h)[0]) / (2.0 * h);
            CHECK(std::abs(v.m1 - m1) <= 1e-6 * std::abs(v.m1));
        }
    }
}

TEST_CASE("integrals I and Ihat") {
    for (const auto& m : test_measures()) {
        for (cplx z : {cplx(1.5, 0.8), cplx(-0.7, 0.2), cplx(5.0, 0.05)}) {
            const auto v = m_transform(m, z);
            const double Iref = ref::integrate(m, [&](double x) { return x / std::norm(x - z); });
            CHECK(v.I == doctest::Approx(Iref).epsilon(1e-11));
            CHECK(v.I == doctest::Approx(v.psi.imag() * -1.0 / z.imag()).epsilon(1e-10));
            CHECK(v.Ihat == doctest::Approx((v.M / z).imag() / z.imag()).epsilon(1e-9));
        }
        // real points: Ihat is the derivative of M/z
        for (double x : {-0.5, -3.0, 6.0}) {
            if (m.on_support(x)) continue;
            const double h = 1e-5;
            const auto v = m_transform(m, x);
            const double d = ((M_value(m, x + h) / (x + h)) - (M_value(m, x - h) / (x - h))).real() / (2.0 * h);
            CHECK(v.Ihat == doctest::Approx(d).epsilon(1e-6));
        }
    }
}

TEST_CASE("hat mass asymptotics on the negative axis") {
    for (const auto& m : test_measures()) {
        const double z = -1e3;
        const auto v = m_transform(m, z);
        const double var = m.moment(2) / (m.mean() * m.mean()) - 1.0;
        // the hat mass is the variance of the mean-normalized law
        CHECK(std::abs(z * z * v.Ihat - var) <= 1e-2 * var);
    }
}

TEST_CASE("doubling nodes away from the support") {
    for (const auto& m : test_measures()) {
        for (cplx z : {cplx(2.0, 0.05), cplx(-0.05, 0.0), cplx(4.2, 0.0), cplx(0.7, 0.06)}) {
            if (m.distance_to_support(z) < 0.05) continue;
            int n = 0;
            for (const auto& c : m.components()) n = std::max(n, quadrature_nodes(c, z));
            if (n == 0) continue;
            const cplx a = stieltjes(m, z, 0, {n, false})[0];
            const cplx b = stieltjes(m, z, 0, {2 * n, false})[0];
            CHECK(std::abs(a - b) <= 1e-12);
        }
    }
}

TEST_CASE("contour deformation close to the support") {
    const auto u = make_jacobi(1.0, 3.0, 0.0, 0.0);
    for (double x : {1.05, 1.7, 2.0, 2.95}) {
        for (double y : {1e-3, 1e-6, 1e-9}) {
            const cplx z(x, y);
            const cplx exact = 0.5 * std::log((3.0 - z) / (1.0 - z));
            CHECK(rel(stieltjes(u, z)[0], exact) < 1e-12);
        }
    }
    const auto m = mp();
    for (double x : {0.3, 2.0, 3.7}) {
        const cplx z(x, 1e-7);
        CHECK(rel(stieltjes(m, z)[0], mp_closed_form(z)) < 1e-9);
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(stieltjes(make_jacobi(1.0, 3.0, 0.0, 0.0), 2.0), SingularityError);
    CHECK_THROWS_AS(stieltjes(two_point(), 2.0), SingularityError);
    CHECK_THROWS_AS(stieltjes(two_point(), 0.0), SingularityError);
    const Measure pole({{1.0, 0.5}, {3.0, 0.5}}, {});
    bool thrown = false;
    try {
        m_transform(pole, 1.5);
    } catch (const PoleError& e) {
        thrown = true;
        CHECK(e.location == cplx(1.5, 0.0));
    }
    CHECK(thrown);
    CHECK_THROWS_AS(eta_psi(mp(), 0.0), DomainError);
}
