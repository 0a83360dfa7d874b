#include "fmc/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "fmc/density.hpp"
#include "fmc/edges.hpp"
#include "fmc/io.hpp"
#include "fmc/oracles.hpp"
#include "fmc/subordination.hpp"
#include "fmc/transforms.hpp"

namespace fmc {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

struct Detail {
    std::ostringstream os;
    Detail& kv(const char* k, double v) {
        sep();
        os << k << '=' << fmt(v);
        return *this;
    }
    Detail& kv(const char* k, const std::string& v) {
        sep();
        os << k << '=' << v;
        return *this;
    }
    void sep() {
        if (os.tellp() > 0) os << ' ';
    }
    std::string str() const { return os.str(); }
};

Measure bernoulli() { return Measure({{0.0, 0.5}, {2.0, 0.5}}, {}); }
Measure mp() { return make_jacobi(0.0, 4.0, -0.5, 0.5); }
Measure mean_one(const Measure& m) { return dilate(m, 1.0 / m.mean()); }

struct Pair {
    const char* label;
    Measure mu, nu;
};

// the two edge test pairs
std::vector<Pair> edge_pairs() {
    return {{"A", make_jacobi(1.0, 3.0, 0.5, -0.5), make_jacobi(1.0, 3.0, 0.5, -0.5)},
            {"B", make_jacobi(0.5, 2.0, 0.0, 0.3), make_jacobi(1.0, 4.0, -0.3, 0.2)}};
}

DensityOptions dens_opts(const AcceptanceConfig& cfg) {
    DensityOptions o;
    o.perturbation = cfg.perturbation;
    return o;
}

CriterionResult bernoulli_reproduction(const AcceptanceConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Measure b = bernoulli();
    const AtomReport at = atoms(b, b);
    const auto grid = density_grid(b, b, 0.05, 3.95, 512, dens_opts(cfg));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "bernoulli pipeline: " << secs << " s\n";

    double atom_err = 1.0;
    if (at.entries.size() == 1 && at.entries[0].c == 0.0) atom_err = std::abs(at.entries[0].mass - 0.5);
    const auto cmp = compare(grid, bernoulli_square(), 0.0);
    const auto wide = density_grid(b, b, 0.01, 3.99, 512, dens_opts(cfg));
    const auto mc = mass_check(wide, at);

    CriterionResult r{1, "bernoulli_reproduction", false, ""};
    r.pass = atom_err <= 1e-12 && cmp.max_rel_err <= 1e-3 && grid.failures == 0 && secs <= 30.0 && mc.defect <= 2e-3;
    Detail d;
    d.kv("atoms", static_cast<double>(at.entries.size()))
        .kv("atom_mass_err", atom_err)
        .kv("max_rel_err", cmp.max_rel_err)
        .kv("points", static_cast<double>(cmp.compared))
        .kv("failures", static_cast<double>(grid.failures))
        .kv("mass_defect", mc.defect)
        .kv("runtime_ok", secs <= 30.0 ? "yes" : "no");
    r.detail = d.str();
    return r;
}

CriterionResult identity_element(const AcceptanceConfig& cfg) {
    const Measure u = make_jacobi(1.0, 3.0, 0.0, 0.0);
    const auto grid = density_grid(u, point_mass(1.0), 1.05, 2.95, 256, dens_opts(cfg));
    const ClosedForm uniform{"uniform", [&u](double x) { return u.density(x); }, {}, {1.0, 3.0}, {}};
    const auto cmp = compare(grid, uniform, 0.0);
    CriterionResult r{2, "identity_element", false, ""};
    r.pass = cmp.max_rel_err <= 1e-6 && grid.failures == 0 && cmp.compared == 256;
    Detail d;
    d.kv("max_rel_err", cmp.max_rel_err).kv("points", static_cast<double>(cmp.compared));
    r.detail = d.str();
    return r;
}

CriterionResult fuss_catalan_check(const AcceptanceConfig& cfg) {
    const Measure m = mp();
    const auto grid = density_grid(m, m, 0.5, 6.0, 512, dens_opts(cfg));
    const auto cmp = compare(grid, fuss_catalan(), 0.0);
    // graded grid x = X u^3 resolves the x^(-2/3) growth at the origin
    const double X = 6.8;
    const int n = 2048;
    const double u0 = std::cbrt(1e-7 / X);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        const double u = u0 + (1.0 - u0) * i / (n - 1);
        xs[i] = X * u * u * u;
    }
    const auto full = density_on(m, m, xs, dens_opts(cfg));
    const auto mc = mass_check(full, atoms(m, m));
    const double oracle_mass = closed_form_mass(fuss_catalan());
    CriterionResult r{3, "fuss_catalan", false, ""};
    r.pass = cmp.max_rel_err <= 1e-3 && grid.failures == 0 && full.failures == 0 && mc.defect <= 1e-3 &&
             std::abs(oracle_mass - 1.0) <= 1e-3;
    Detail d;
    d.kv("max_rel_err", cmp.max_rel_err)
        .kv("pipeline_mass", mc.mass)
        .kv("oracle_mass", oracle_mass)
        .kv("failures", static_cast<double>(grid.failures + full.failures));
    r.detail = d.str();
    return r;
}

std::vector<Pair> moment_pairs() {
    return {{"A", mean_one(make_jacobi(1.0, 3.0, 0.5, -0.5)), mean_one(make_jacobi(1.0, 3.0, 0.5, -0.5))},
            {"B", mean_one(make_jacobi(0.5, 2.0, 0.0, 0.3)), mean_one(make_jacobi(1.0, 4.0, -0.3, 0.2))},
            {"C", mean_one(make_jacobi(1.0, 3.0, -0.5, 0.5)), mean_one(make_jacobi(2.0, 5.0, 0.2, 0.6))}};
}

CriterionResult moment_oracle(const AcceptanceConfig& cfg) {
    double worst = 0.0, worst_m2 = 0.0, worst_series_m2 = 0.0;
    int failures = 0;
    for (const auto& p : moment_pairs()) {
        const auto info = find_support(p.mu, p.nu);
        // cosine-spaced nodes absorb the square-root edges
        const int n = 2048;
        std::vector<double> xs(n);
        const double c = 0.5 * (info.E_minus + info.E_plus), h = 0.5 * (info.E_plus - info.E_minus);
        for (int i = 0; i < n; ++i) xs[i] = c - h * std::cos(std::numbers::pi * (i + 0.5) / n);
        DensityOptions o = dens_opts(cfg);
        o.edges = std::make_pair(info.E_minus, info.E_plus);
        const auto grid = density_on(p.mu, p.nu, xs, o);
        failures += grid.failures;
        const auto gm = grid_moments(grid, atoms(p.mu, p.nu), 4);
        const auto sm = s_series_moments(p.mu, p.nu, 4);
        for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(gm[k] - sm[k]) / std::abs(sm[k]));
        const double m2 = p.mu.moment(2) + p.nu.moment(2) - 1.0;
        worst_m2 = std::max(worst_m2, std::abs(gm[1] - m2));
        worst_series_m2 = std::max(worst_series_m2, std::abs(sm[1] - m2));
    }
    CriterionResult r{4, "moment_oracle", false, ""};
    r.pass = worst <= 1e-3 && worst_m2 <= 1e-6 && worst_series_m2 <= 1e-6 && failures == 0;
    Detail d;
    d.kv("max_rel_err", worst).kv("m2_grid_err", worst_m2).kv("m2_series_err", worst_series_m2);
    r.detail = d.str();
    return r;
}

std::vector<Pair> invariant_pairs() {
    return {{"bernoulli", bernoulli(), bernoulli()},
            {"mp", mp(), mp()},
            {"A", make_jacobi(1.0, 3.0, 0.5, -0.5), make_jacobi(1.0, 3.0, 0.5, -0.5)},
            {"B", make_jacobi(0.5, 2.0, 0.0, 0.3), make_jacobi(1.0, 4.0, -0.3, 0.2)},
            {"mixed", make_jacobi(1.0, 3.0, 0.0, 0.0),
             Measure({{0.5, 0.3}}, {make_component(1.0, 2.5, -0.3, 0.4, 0.7)})}};
}

CriterionResult subordination_invariants(const AcceptanceConfig&) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ux(-3.0, 8.0), uy(-2.0, 1.0);
    double worst_res = 0.0, worst_arg = 0.0, worst_prod = 0.0, worst_im = 0.0;
    int failures = 0, samples = 0;
    for (const auto& p : invariant_pairs()) {
        for (int i = 0; i < 1000; ++i) {
            const cplx z(ux(rng), std::pow(10.0, uy(rng)));
            ++samples;
            const auto s = try_solve_point(p.mu, p.nu, z);
            if (!s.converged) {
                ++failures;
                continue;
            }
            const auto [r1, r2] = equation_residuals(p.mu, p.nu, z, s.omega_mu, s.omega_nu);
            worst_res = std::max(worst_res, std::max(r1, r2) / (1.0 + std::norm(z)));
            const double argz = std::arg(z);
            worst_arg = std::max({worst_arg, argz - std::arg(s.omega_mu), argz - std::arg(s.omega_nu)});
            const auto tm = m_transform(p.mu, s.omega_nu);
            const auto tn = m_transform(p.nu, s.omega_mu);
            worst_prod = std::max(worst_prod, std::norm(z) * tm.Ihat * tn.Ihat);
            const double lhs = (z * s.m_rho + 1.0).imag();
            const double rhs = tn.I * s.omega_mu.imag();
            worst_im = std::max(worst_im, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
    }
    CriterionResult r{5, "subordination_invariants", false, ""};
    r.pass = failures == 0 && worst_res <= 1e-12 && worst_arg <= 1e-10 && worst_prod <= 1.0 + 1e-10 && worst_im <= 1e-10;
    Detail d;
    d.kv("samples", static_cast<double>(samples))
        .kv("failures", static_cast<double>(failures))
        .kv("max_scaled_residual", worst_res)
        .kv("max_arg_deficit", worst_arg)
        .kv("max_hat_product", worst_prod)
        .kv("max_im_identity_err", worst_im);
    r.detail = d.str();
    return r;
}

CriterionResult variance_asymptotics(const AcceptanceConfig&) {
    const cplx z(0.0, 1e4);
    double worst_omega = 0.0, worst_M = 0.0;
    std::vector<Pair> pairs = {{"bernoulli", bernoulli(), bernoulli()}, {"mp", mp(), mp()}};
    for (auto& p : moment_pairs()) pairs.push_back(p);
    for (const auto& p : pairs) {
        const auto s = solve_point(p.mu, p.nu, z);
        for (const auto& [m, omega] : {std::pair{&p.mu, s.omega_mu}, std::pair{&p.nu, s.omega_nu}}) {
            const double var = m->variance();
            const double scale = std::max(1.0, var);
            worst_omega = std::max(worst_omega, std::abs(omega - z + var) / scale);
            worst_M = std::max(worst_M, std::abs(M_value(*m, z) - z + var) / scale);
        }
    }
    CriterionResult r{6, "variance_asymptotics", false, ""};
    r.pass = worst_omega <= 1e-2 && worst_M <= 1e-2;
    Detail d;
    d.kv("omega_err", worst_omega).kv("M_err", worst_M);
    r.detail = d.str();
    return r;
}

// least-squares slope and prefactor of log y = log C + s log d
std::pair<double, double> loglog_fit(const std::vector<double>& d, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double lx = std::log(d[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double s = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {s, std::exp((sy - s * sx) / n)};
}

CriterionResult edge_criteria(const AcceptanceConfig&) {
    double worst_res = 0.0, worst_agree = 0.0, worst_slope = 0.0, worst_gamma = 0.0;
    bool ordering = true;
    std::string error;
    for (const auto& p : edge_pairs()) {
        SupportInfo info;
        try {
            info = analyze_edges(p.mu, p.nu);
        } catch (const std::exception& e) {
            error = e.what();
            break;
        }
        worst_res = std::max({worst_res, info.residuals.first, info.residuals.second});
        worst_agree = std::max({worst_agree, std::abs(info.scan_edges.first - info.E_minus),
                                std::abs(info.scan_edges.second - info.E_plus)});
        ordering = ordering && info.omega_nu_at.first < p.mu.support_lo() &&
                   info.omega_nu_at.second > p.mu.support_hi() && info.omega_mu_at.first < p.nu.support_lo() &&
                   info.omega_mu_at.second > p.nu.support_hi();
        const double L = info.E_plus - info.E_minus;
        const EpsLadder deep = EpsLadder::halving(1e-2, 24);
        for (int side = 0; side < 2; ++side) {
            std::vector<double> ds, ys;
            for (int k = 0; k <= 8; ++k) {
                const double delta = L * std::pow(10.0, -6.0 + 0.25 * k);
                const double x = side == 0 ? info.E_minus + delta : info.E_plus - delta;
                const auto s = solve_boundary(p.mu, p.nu, x, deep);
                ds.push_back(delta);
                ys.push_back(std::max(s.omega_mu.imag(), 1e-300));
            }
            const auto [slope, pref] = loglog_fit(ds, ys);
            const double g = side == 0 ? info.gamma_mu.first : info.gamma_mu.second;
            worst_slope = std::max(worst_slope, std::abs(slope - 0.5));
            worst_gamma = std::max(worst_gamma, std::abs(pref - g) / g);
        }
    }
    CriterionResult r{7, "edges", false, ""};
    r.pass = error.empty() && worst_res <= 1e-8 && worst_agree <= 1e-6 && ordering && worst_slope <= 0.02 &&
             worst_gamma <= 0.01;
    Detail d;
    d.kv("max_edge_residual", worst_res)
        .kv("detector_gap", worst_agree)
        .kv("ordering", ordering ? "yes" : "no")
        .kv("max_slope_dev", worst_slope)
        .kv("max_gamma_rel_err", worst_gamma);
    if (!error.empty()) d.kv("error", "\"" + error + "\"");
    r.detail = d.str();
    return r;
}

CriterionResult sqrt_ratio(const AcceptanceConfig& cfg) {
    double worst_spread = 0.0, worst_change = 0.0;
    int failures = 0;
    for (const auto& p : edge_pairs()) {
        const auto info = find_support(p.mu, p.nu);
        const double L = info.E_plus - info.E_minus;
        const double lo = info.E_minus + 0.005 * L, hi = info.E_plus - 0.005 * L;
        DensityOptions o = dens_opts(cfg);
        o.edges = std::make_pair(info.E_minus, info.E_plus);
        auto ratio_field = [&](int n) {
            const auto g = density_grid(p.mu, p.nu, lo, hi, n, o);
            failures += g.failures;
            std::vector<double> r(n);
            for (int i = 0; i < n; ++i) {
                r[i] = g.fs[i] / (std::sqrt(g.xs[i] - info.E_minus) * std::sqrt(info.E_plus - g.xs[i]));
            }
            return r;
        };
        const auto r1 = ratio_field(513);
        const auto r2 = ratio_field(1025);
        const auto [mn, mx] = std::minmax_element(r2.begin(), r2.end());
        worst_spread = std::max(worst_spread, *mx / *mn);
        for (std::size_t i = 0; i < r1.size(); ++i) {
            worst_change = std::max(worst_change, std::abs(r2[2 * i] - r1[i]) / r1[i]);
        }
    }
    CriterionResult r{8, "sqrt_ratio", false, ""};
    r.pass = failures == 0 && worst_spread <= 10.0 && worst_change <= 0.02;
    Detail d;
    d.kv("max_over_min", worst_spread).kv("refinement_change", worst_change);
    r.detail = d.str();
    return r;
}

CriterionResult boundedness(const AcceptanceConfig& cfg) {
    const Measure b = bernoulli();
    double worst = 0.0, peak = 0.0;
    int failures = 0;
    for (auto [lo, hi] : {std::pair{0.01, 3.99}, std::pair{1e-6, 1.0}}) {
        const auto g1 = density_grid(b, b, lo, hi, 512, dens_opts(cfg));
        const auto g2 = density_grid(b, b, lo, hi, 1024, dens_opts(cfg));
        failures += g1.failures + g2.failures;
        worst = std::max(worst, std::abs(g2.xf_max - g1.xf_max) / g1.xf_max);
        peak = std::max(peak, g2.xf_max);
    }
    CriterionResult r{9, "boundedness", false, ""};
    r.pass = failures == 0 && worst <= 0.05 && std::isfinite(peak);
    Detail d;
    d.kv("xf_max", peak).kv("drift", worst);
    r.detail = d.str();
    return r;
}

CriterionResult determinism(const AcceptanceConfig& cfg) {
    auto snapshot = [&cfg]() {
        std::ostringstream os;
        const Measure b = bernoulli();
        write_density_csv(os, density_grid(b, b, 0.05, 3.95, 128, dens_opts(cfg)));
        const auto p = edge_pairs().front();
        os << edges_json(analyze_edges(p.mu, p.nu));
        os << format_report({identity_element(cfg)});
        return os.str();
    };
    const std::string a = snapshot();
    const std::string b = snapshot();
    CriterionResult r{10, "determinism", a == b, ""};
    Detail d;
    d.kv("bytes", static_cast<double>(a.size())).kv("identical", a == b ? "yes" : "no");
    r.detail = d.str();
    return r;
}

using Runner = std::function<CriterionResult(const AcceptanceConfig&)>;

const std::vector<Runner>& runners() {
    static const std::vector<Runner> r = {bernoulli_reproduction, identity_element, fuss_catalan_check,
                                          moment_oracle,          subordination_invariants, variance_asymptotics,
                                          edge_criteria,          sqrt_ratio,       boundedness,
                                          determinism};
    return r;
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
    static const std::vector<CriterionInfo> c = {
        {1, "bernoulli_reproduction", "oracles"}, {2, "identity_element", "oracles"},
        {3, "fuss_catalan", "oracles"},           {4, "moment_oracle", "oracles"},
        {5, "subordination_invariants", "subordination"}, {6, "variance_asymptotics", "subordination"},
        {7, "edges", "edges"},                    {8, "sqrt_ratio", "edges"},
        {9, "boundedness", "density"},            {10, "determinism", "determinism"}};
    return c;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg) {
    std::vector<CriterionResult> out;
    const auto& info = criteria();
    for (std::size_t i = 0; i < info.size(); ++i) {
        if (!cfg.filter.empty() && cfg.filter != info[i].name && cfg.filter != info[i].group) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = runners()[i](cfg);
        } catch (const std::exception& e) {
            r = {info[i].id, info[i].name, false, std::string("error=\"") + e.what() + "\""};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "criterion " << r.id << " " << r.name << ": " << secs << " s\n";
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_report(const std::vector<CriterionResult>& results) {
    std::ostringstream os;
    int passed = 0;
    for (const auto& r : results) {
        char id[8];
        std::snprintf(id, sizeof id, "C%02d", r.id);
        os << id << ' ' << (r.pass ? "PASS" : "FAIL") << ' ' << r.name << ' ' << r.detail << '\n';
        passed += r.pass;
    }
    os << "summary " << passed << '/' << results.size() << " passed\n";
    return os.str();
}

std::string format_report_json(const std::vector<CriterionResult>& results) {
    nlohmann::json j;
    j["criteria"] = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        all = all && r.pass;
    }
    j["all_pass"] = all;
    return j.dump(2) + "\n";
}

}  // namespace fmc
