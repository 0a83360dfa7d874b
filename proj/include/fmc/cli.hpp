#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace fmc::cli {

struct RunConfig {
    std::string subcommand;
    std::string mu_path;
    std::string nu_path;
    std::optional<double> grid_lo;
    std::optional<double> grid_hi;
    int grid_n = 512;
    double eps_start = 1e-2;
    int eps_rungs = 14;
    std::string out;        // empty: standard output
    std::string edges_out;  // empty: not written (convolve) or standard output (edges)
    bool json_only = false;
    std::string filter;
    double perturb = 0.0;
};

enum ExitCode { kOk = 0, kFatal = 1, kPartial = 2 };

int cmd_convolve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_transform(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_edges(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatches on cfg.subcommand.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace fmc::cli
