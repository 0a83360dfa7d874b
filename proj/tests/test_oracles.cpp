#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "doctest.h"
#include "fmc/density.hpp"
#include "fmc/errors.hpp"
#include "fmc/measure.hpp"
#include "fmc/oracles.hpp"

using namespace fmc;

namespace {

// Set partitions of {0..n-1} as block labels (restricted growth strings).
using Partition = std::vector<int>;

std::vector<Partition> set_partitions(int n) {
    std::vector<Partition> out;
    Partition p(n, 0);
    std::function<void(int, int)> rec = [&](int i, int k) {
        if (i == n) {
            out.push_back(p);
            return;
        }
        for (int b = 0; b <= k; ++b) {
            p[i] = b;
            rec(i + 1, std::max(k, b + 1));
        }
    };
    if (n > 0) rec(1, 1);
    return out;
}

bool noncrossing(const std::vector<int>& labels) {
    const int n = static_cast<int>(labels.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                for (int d = c + 1; d < n; ++d)
                    if (labels[a] == labels[c] && labels[b] == labels[d] && labels[a] != labels[b]) return false;
    return true;
}

int blocks(const Partition& p) { return *std::max_element(p.begin(), p.end()) + 1; }

std::vector<int> block_sizes(const Partition& p) {
    std::vector<int> s(blocks(p), 0);
    for (int b : p) ++s[b];
    return s;
}

// Kreweras complement: the coarsest sigma on 1'..n' with pi and sigma
// noncrossing together on 1 1' 2 2' ... n n'.
Partition kreweras(const Partition& pi) {
    const int n = static_cast<int>(pi.size());
    const int off = blocks(pi);
    Partition best;
    for (const auto& s : set_partitions(n)) {
        std::vector<int> inter;
        for (int i = 0; i < n; ++i) {
            inter.push_back(pi[i]);
            inter.push_back(off + s[i]);
        }
        if (noncrossing(inter) && (best.empty() || blocks(s) < blocks(best))) best = s;
    }
    return best;
}

std::vector<Partition> nc_partitions(int n) {
    std::vector<Partition> out;
    for (const auto& p : set_partitions(n))
        if (noncrossing(p)) out.push_back(p);
    return out;
}

// free cumulants k_1..k_n from moments m_1..m_n
std::vector<double> free_cumulants(const std::vector<double>& m) {
    const int n = static_cast<int>(m.size());
    std::vector<double> k(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) {
        double rest = 0.0;
        for (const auto& p : nc_partitions(j)) {
            if (blocks(p) == 1) continue;
            double t = 1.0;
            for (int s : block_sizes(p)) t *= k[s];
            rest += t;
        }
        k[j] = m[j - 1] - rest;
    }
    return k;
}

// moments of ab for free a, b: sum over NC(n) of k_pi[a] m_K(pi)[b]
std::vector<double> nc_product_moments(const std::vector<double>& ma, const std::vector<double>& mb, int n_max) {
    const auto k = free_cumulants(ma);
    std::vector<double> out;
    for (int n = 1; n <= n_max; ++n) {
        double s = 0.0;
        for (const auto& p : nc_partitions(n)) {
            double t = 1.0;
            for (int b : block_sizes(p)) t *= k[b];
            for (int b : block_sizes(kreweras(p))) t *= mb[b - 1];
            s += t;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<double> moments(const Measure& m, int n) {
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) out.push_back(m.moment(k));
    return out;
}

}  // namespace

TEST_CASE("noncrossing partition counts") {
    const int catalan[] = {1, 2, 5, 14, 42};
    for (int n = 1; n <= 5; ++n) CHECK(nc_partitions(n).size() == static_cast<std::size_t>(catalan[n - 1]));
    for (int n = 1; n <= 4; ++n)
        for (const auto& p : nc_partitions(n)) CHECK(blocks(p) + blocks(kreweras(p)) == n + 1);
}

TEST_CASE("closed forms integrate to one") {
    for (const auto& c : {bernoulli_square(), marchenko_pastur(), fuss_catalan()}) {
        INFO(c.name);
        CHECK(std::abs(closed_form_mass(c) - 1.0) <= 1e-10);
    }
    CHECK(bernoulli_square().atoms.size() == 1);
    CHECK(bernoulli_square_density(2.0) == doctest::Approx(1.0 / (4.0 * std::acos(-1.0))).epsilon(1e-15));
    CHECK(table_density("marchenko_pastur", 2.0) == doctest::Approx(1.0 / (2.0 * std::acos(-1.0))).epsilon(1e-15));
    CHECK(table_density("marchenko_pastur", 5.0) == 0.0);
    CHECK_THROWS(table_density("semicircle", 1.0));
}

TEST_CASE("Fuss-Catalan numbers") {
    const auto mp = make_jacobi(0.0, 4.0, -0.5, 0.5);
    const auto m = s_series_moments(mp, mp, 6);
    const double fc[] = {1, 3, 12, 55, 273, 1428};
    for (int k = 0; k < 6; ++k) CHECK(m[k] == doctest::Approx(fc[k]).epsilon(1e-12));
}

TEST_CASE("S-series against noncrossing partitions") {
    const std::vector<std::pair<Measure, Measure>> pairs = {
        {make_jacobi(1.0, 3.0, 0.5, -0.5), make_jacobi(1.0, 3.0, 0.5, -0.5)},
        {make_jacobi(0.5, 2.0, 0.0, 0.3), make_jacobi(1.0, 4.0, -0.3, 0.2)},
        {Measure({{0.5, 0.3}}, {make_component(1.0, 2.5, -0.3, 0.4, 0.7)}), make_jacobi(2.0, 5.0, 0.2, 0.6)},
        {Measure({{0.0, 0.5}, {2.0, 0.5}}, {}), make_jacobi(0.0, 4.0, -0.5, 0.5)}};
    for (const auto& [mu, nu] : pairs) {
        const auto got = s_series_moments(mu, nu, 5);
        const auto want = nc_product_moments(moments(mu, 5), moments(nu, 5), 5);
        for (int k = 0; k < 5; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-11));
        const auto swapped = s_series_moments(nu, mu, 5);
        for (int k = 0; k < 5; ++k) CHECK(swapped[k] == doctest::Approx(got[k]).epsilon(1e-12));
    }
}

TEST_CASE("S-series identities") {
    const auto mu = make_jacobi(0.5, 2.0, 0.0, 0.3);
    const auto m = s_series_moments(mu, point_mass(1.0), 6);
    for (int k = 1; k <= 6; ++k) CHECK(m[k - 1] == doctest::Approx(mu.moment(k)).epsilon(1e-12));
    // mean-one inputs: m2 adds up minus one
    const auto a = make_jacobi(1.0, 3.0, 0.5, -0.5);
    const double s = 1.0 / a.mean();
    const auto a1 = make_jacobi(s, 3.0 * s, 0.5, -0.5);
    const auto b1 = make_jacobi(0.5 / mu.mean(), 2.0 / mu.mean(), 0.0, 0.3);
    const auto r = s_series_moments(a1, b1, 2);
    CHECK(r[1] == doctest::Approx(a1.moment(2) + b1.moment(2) - 1.0).epsilon(1e-12));

    CHECK_THROWS_AS(s_series_moments(std::vector<double>{0.0, 1.0, 1.0}, std::vector<double>{1.0, 2.0, 5.0}, 2),
                    DomainError);
}

TEST_CASE("compare against oracle samples") {
    const auto oracle = marchenko_pastur();
    DensityGrid g;
    for (int i = 1; i < 100; ++i) {
        const double x = 0.04 * i;
        g.xs.push_back(x);
        g.fs.push_back(oracle.density(x));
    }
    const auto c = compare(g, oracle, 0.05);
    CHECK(c.max_rel_err == 0.0);
    CHECK(c.mass_err == 0.0);
    CHECK(c.compared > 90);

    g.fs[50] *= 1.01;
    CHECK(compare(g, oracle, 0.05).max_rel_err == doctest::Approx(0.01).epsilon(1e-10));
}
