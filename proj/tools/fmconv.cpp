#include <iostream>

#include "CLI11.hpp"

#include "fmc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Free multiplicative convolution of measures on [0, inf) by subordination"};
    app.require_subcommand(1);
    fmc::cli::RunConfig cfg;

    auto add_grid = [&cfg](CLI::App* sc) {
        sc->add_option("--grid-lo", cfg.grid_lo, "Left end of the grid (default: product of support minima)");
        sc->add_option("--grid-hi", cfg.grid_hi, "Right end of the grid (default: product of support maxima)");
        sc->add_option("--grid-n", cfg.grid_n, "Number of grid points")->capture_default_str();
        sc->add_option("--eps-start", cfg.eps_start, "Largest imaginary offset of the eps ladder")->capture_default_str();
        sc->add_option("--eps-rungs", cfg.eps_rungs, "Number of halvings in the eps ladder")->capture_default_str();
    };

    auto* conv = app.add_subcommand("convolve", "Density, atoms and edges of mu boxtimes nu");
    conv->add_option("--mu", cfg.mu_path, "Measure spec (JSON)")->required();
    conv->add_option("--nu", cfg.nu_path, "Measure spec (JSON)")->required();
    add_grid(conv);
    conv->add_option("--out", cfg.out, "Density CSV (default: standard output)");
    conv->add_option("--edges-out", cfg.edges_out, "Atoms/edges/mass JSON");
    conv->add_flag("--json-only", cfg.json_only, "Skip the CSV and print the JSON report");
    conv->add_option("--perturb", cfg.perturb)->group("");

    auto* tr = app.add_subcommand("transform", "Transforms of mu at x + i eps along the grid");
    tr->add_option("--mu", cfg.mu_path, "Measure spec (JSON)")->required();
    add_grid(tr);
    tr->add_option("--out", cfg.out, "CSV output (default: standard output)");

    auto* ed = app.add_subcommand("edges", "Support edges and square-root coefficients");
    ed->add_option("--mu", cfg.mu_path, "Measure spec (JSON)")->required();
    ed->add_option("--nu", cfg.nu_path, "Measure spec (JSON)")->required();
    add_grid(ed);
    ed->add_option("--edges-out", cfg.edges_out, "Edge JSON (default: standard output)");
    ed->add_option("--out", cfg.out, "Near-edge density CSV");
    ed->add_flag("--json-only", cfg.json_only, "Do not write the CSV");

    auto* va = app.add_subcommand("validate", "Run the acceptance suite against the built-in oracles");
    va->add_option("--filter", cfg.filter, "Criterion name or group (oracles, subordination, edges, density, determinism)");
    va->add_option("--out", cfg.out, "Report file (default: standard output)");
    va->add_flag("--json-only", cfg.json_only, "Emit the report as JSON");
    va->add_option("--perturb", cfg.perturb)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fmc::cli::kFatal;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return fmc::cli::run(cfg, std::cout, std::cerr);
}
