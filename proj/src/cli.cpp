#include "fmc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "fmc/density.hpp"
#include "fmc/edges.hpp"
#include "fmc/errors.hpp"
#include "fmc/io.hpp"
#include "fmc/transforms.hpp"
#include "fmc/validation.hpp"

namespace fmc::cli {

namespace {

using nlohmann::json;

void check_config(const RunConfig& cfg) {
    if (cfg.grid_n < 2) throw DomainError("--grid-n must be at least 2");
    if (cfg.grid_lo && cfg.grid_hi && !(*cfg.grid_lo < *cfg.grid_hi)) throw DomainError("--grid-lo must be below --grid-hi");
    if (!(cfg.eps_start > 0.0)) throw DomainError("--eps-start must be positive");
    if (cfg.eps_rungs < 3) throw DomainError("--eps-rungs must be at least 3");
}

Measure load(const std::string& path, const char* flag) {
    if (path.empty()) throw DomainError(std::string(flag) + " is required");
    return load_measure(path);
}

// Writes to a file, or to `fallback` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot write '" + path + "'");
    f << text;
}

// Unset ends default to cell midpoints of the support, so that no grid point
// lands on an endpoint where the density may diverge.
std::pair<double, double> grid_range(const RunConfig& cfg, double lo_default, double hi_default) {
    const double h = (hi_default - lo_default) / cfg.grid_n;
    double lo = cfg.grid_lo.value_or(lo_default + 0.5 * h);
    const double hi = cfg.grid_hi.value_or(hi_default - 0.5 * h);
    if (!(lo > 0.0)) lo = 1e-3 * hi;
    if (!(lo < hi)) throw DomainError("empty grid range");
    return {lo, hi};
}

std::optional<SupportInfo> try_edges(const Measure& mu, const Measure& nu) {
    if (!validate(mu).edge_machinery || !validate(nu).edge_machinery) return std::nullopt;
    return analyze_edges(mu, nu);
}

int fatal(std::ostream& err, const std::exception& e) {
    err << "fmconv: " << e.what() << '\n';
    return kFatal;
}

}  // namespace

int cmd_convolve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        check_config(cfg);
        const Measure mu = load(cfg.mu_path, "--mu");
        const Measure nu = load(cfg.nu_path, "--nu");

        const auto at = atoms(mu, nu);
        const auto info = try_edges(mu, nu);
        const auto [lo, hi] = grid_range(cfg, mu.support_lo() * nu.support_lo(), mu.support_hi() * nu.support_hi());
        DensityOptions opt;
        opt.ladder = EpsLadder::halving(cfg.eps_start, cfg.eps_rungs);
        opt.perturbation = cfg.perturb;
        if (info) opt.edges = std::make_pair(info->E_minus, info->E_plus);
        const auto grid = density_grid(mu, nu, lo, hi, cfg.grid_n, opt);
        const auto mass = mass_check(grid, at);

        json report = json::parse(atoms_json(at));
        report["edges"] = info ? json::parse(edges_json(*info)) : json(nullptr);
        report["grid"] = {{"lo", lo}, {"hi", hi}, {"n", cfg.grid_n}, {"failures", grid.failures}};
        report["mass"] = {{"mass", mass.mass}, {"defect", mass.defect}, {"continuous", mass.continuous_mass}};
        report["xf_max"] = grid.xf_max;

        if (!cfg.json_only) {
            std::ostringstream csv;
            write_density_csv(csv, grid);
            emit(cfg.out, csv.str(), out);
        }
        if (cfg.json_only || !cfg.edges_out.empty()) emit(cfg.edges_out, report.dump(2) + "\n", out);

        for (std::size_t i = 0; i < grid.diagnostics.size(); ++i) {
            const auto& d = grid.diagnostics[i];
            if (!d.ok || !d.message.empty()) err << "x=" << fmt(grid.xs[i]) << ": " << d.message << '\n';
        }
        return grid.failures > 0 ? kPartial : kOk;
    } catch (const std::exception& e) {
        return fatal(err, e);
    }
}

int cmd_transform(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        check_config(cfg);
        const Measure mu = load(cfg.mu_path, "--mu");
        const auto [lo, hi] = grid_range(cfg, std::max(mu.support_lo() - 1.0, 1e-3), mu.support_hi() + 1.0);
        std::ostringstream csv;
        csv << "x,eps,re_m,im_m,re_M,im_M,re_Mp,im_Mp,re_Mpp,im_Mpp,re_eta,im_eta,re_psi,im_psi,I,Ihat\n";
        int failures = 0;
        for (int i = 0; i < cfg.grid_n; ++i) {
            const double x = i + 1 == cfg.grid_n ? hi : lo + (hi - lo) * i / (cfg.grid_n - 1);
            const cplx z(x, cfg.eps_start);
            csv << fmt(x) << ',' << fmt(cfg.eps_start);
            try {
                const auto v = m_transform(mu, z);
                for (cplx c : {v.m, v.M, v.Mp, v.Mpp, v.eta, v.psi}) csv << ',' << fmt(c.real()) << ',' << fmt(c.imag());
                csv << ',' << fmt(v.I) << ',' << fmt(v.Ihat) << '\n';
            } catch (const std::exception& e) {
                ++failures;
                err << "x=" << fmt(x) << ": " << e.what() << '\n';
                for (int k = 0; k < 14; ++k) csv << ",nan";
                csv << '\n';
            }
        }
        emit(cfg.out, csv.str(), out);
        return failures > 0 ? kPartial : kOk;
    } catch (const std::exception& e) {
        return fatal(err, e);
    }
}

int cmd_edges(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        check_config(cfg);
        const Measure mu = load(cfg.mu_path, "--mu");
        const Measure nu = load(cfg.nu_path, "--nu");
        for (const auto* m : {&mu, &nu}) {
            const auto r = validate(*m);
            if (!r.edge_machinery) {
                err << "fmconv: edges need both measures in the single-interval class "
                       "(one Jacobi component on (0, inf), no atoms)\n";
                err << "validate: valid=" << (r.valid ? "true" : "false")
                    << " edge_machinery=false atoms=" << m->atoms().size()
                    << " components=" << m->components().size() << " support_lo=" << fmt(m->support_lo()) << '\n';
                for (const auto& v : r.violations) err << "  " << v << '\n';
                return kFatal;
            }
        }
        const auto info = analyze_edges(mu, nu);
        emit(cfg.edges_out, edges_json(info) + "\n", out);
        if (!cfg.json_only && !cfg.out.empty()) {
            // density profile across both near-edge windows
            const double w = near_edge_window(info);
            std::vector<double> xs;
            const int n = std::max(cfg.grid_n / 2, 2);
            for (double e : {info.E_minus, info.E_plus}) {
                for (int i = 0; i < n; ++i) xs.push_back(e - w + 2.0 * w * i / (n - 1));
            }
            DensityOptions opt;
            opt.ladder = EpsLadder::halving(cfg.eps_start, cfg.eps_rungs);
            opt.edges = std::make_pair(info.E_minus, info.E_plus);
            const auto g = density_on(mu, nu, xs, opt);
            std::ostringstream csv;
            csv << "x,f,f_model\n";
            for (std::size_t i = 0; i < xs.size(); ++i) {
                csv << fmt(xs[i]) << ',' << fmt(g.fs[i]) << ',' << fmt(near_edge_density(info, mu, nu, xs[i])) << '\n';
            }
            emit(cfg.out, csv.str(), out);
        }
        return kOk;
    } catch (const std::exception& e) {
        return fatal(err, e);
    }
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        AcceptanceConfig ac;
        ac.filter = cfg.filter;
        ac.perturbation = cfg.perturb;
        if (!ac.filter.empty()) {
            bool known = false;
            for (const auto& c : criteria()) known = known || ac.filter == c.name || ac.filter == c.group;
            if (!known) throw DomainError("unknown filter '" + ac.filter + "'");
        }
        const auto results = run_acceptance(ac);
        emit(cfg.out, cfg.json_only ? format_report_json(results) : format_report(results), out);
        for (const auto& r : results)
            if (!r.pass) return kFatal;
        return kOk;
    } catch (const std::exception& e) {
        return fatal(err, e);
    }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.subcommand == "convolve") return cmd_convolve(cfg, out, err);
    if (cfg.subcommand == "transform") return cmd_transform(cfg, out, err);
    if (cfg.subcommand == "edges") return cmd_edges(cfg, out, err);
    if (cfg.subcommand == "validate") return cmd_validate(cfg, out, err);
    err << "fmconv: unknown subcommand '" << cfg.subcommand << "'\n";
    return kFatal;
}

}  // namespace fmc::cli
