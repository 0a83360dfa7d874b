#pragma once

#include <string>
#include <vector>

namespace fmc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // deterministic key=value list
};

struct AcceptanceConfig {
    /// Empty runs everything; otherwise a criterion name or a group
    /// ("oracles", "subordination", "edges", "density", "determinism").
    std::string filter;
    /// Relative perturbation applied to every computed density (sensitivity hook).
    double perturbation = 0.0;
};

/// Names of the criteria in order, with their groups.
struct CriterionInfo {
    int id;
    const char* name;
    const char* group;
};
const std::vector<CriterionInfo>& criteria();

/// Runs the selected criteria. Timing goes to standard error only.
std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg);

/// One line per criterion plus a summary line; byte-stable across runs.
std::string format_report(const std::vector<CriterionResult>& results);

/// Same content as a JSON document.
std::string format_report_json(const std::vector<CriterionResult>& results);

/// Full precision decimal.
std::string fmt(double v);

}  // namespace fmc
