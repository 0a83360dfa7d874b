#pragma once

#include <iosfwd>
#include <string>

#include "fmc/density.hpp"
#include "fmc/edges.hpp"
#include "fmc/measure.hpp"

namespace fmc {

/// Parses a measure spec:
/// {"atoms": [{"x": .., "w": ..}], "jacobi": [{"lo", "hi", "t_lo", "t_hi", "weight"}]}
/// Rejects specs whose weights do not sum to 1 within 1e-9. Throws DomainError.
Measure parse_measure(const std::string& text);
Measure load_measure(const std::string& path);

/// Spec text for a measure (inverse of parse_measure).
std::string measure_to_json(const Measure& m);

inline constexpr const char* kDensityCsvHeader =
    "x,f,re_m,im_m,re_omega_mu,im_omega_mu,re_omega_nu,im_omega_nu,residual";

void write_density_csv(std::ostream& os, const DensityGrid& grid);

std::string atoms_json(const AtomReport& atoms);
std::string edges_json(const SupportInfo& info);

}  // namespace fmc
