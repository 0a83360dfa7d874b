#include "fmc/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fmc/errors.hpp"
#include "fmc/validation.hpp"

namespace fmc {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw DomainError(std::string("measure spec: missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

// doubles are dumped as the shortest decimal that round-trips exactly
json raw_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Measure parse_measure(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("measure spec: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("measure spec: top level must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "atoms" && key != "jacobi") throw DomainError("measure spec: unknown field '" + key + "'");
    }
    std::vector<Atom> atoms;
    std::vector<JacobiComponent> comps;
    if (j.contains("atoms")) {
        if (!j["atoms"].is_array()) throw DomainError("measure spec: 'atoms' must be an array");
        for (const auto& a : j["atoms"]) {
            const double w = number(a, "w");
            if (!(w > 0.0 && w <= 1.0)) throw DomainError("measure spec: atom weight must lie in (0, 1]");
            atoms.push_back({number(a, "x"), w});
        }
    }
    if (j.contains("jacobi")) {
        if (!j["jacobi"].is_array()) throw DomainError("measure spec: 'jacobi' must be an array");
        for (const auto& c : j["jacobi"]) {
            comps.push_back(make_component(number(c, "lo"), number(c, "hi"), number(c, "t_lo"), number(c, "t_hi"),
                                           number(c, "weight")));
        }
    }
    double total = 0.0;
    for (const auto& a : atoms) total += a.weight;
    for (const auto& c : comps) total += c.weight;
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("measure spec: weights sum to " + fmt(total) + ", not 1");
    Measure m(std::move(atoms), std::move(comps));
    require_valid(m, "measure spec");
    return m;
}

Measure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read measure spec '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_measure(ss.str());
}

std::string measure_to_json(const Measure& m) {
    json j;
    j["atoms"] = json::array();
    j["jacobi"] = json::array();
    for (const auto& a : m.atoms()) j["atoms"].push_back({{"x", a.location}, {"w", a.weight}});
    for (const auto& c : m.components()) {
        j["jacobi"].push_back({{"lo", c.lo}, {"hi", c.hi}, {"t_lo", c.t_lo}, {"t_hi", c.t_hi}, {"weight", c.weight}});
    }
    return j.dump(2);
}

void write_density_csv(std::ostream& os, const DensityGrid& g) {
    os << kDensityCsvHeader << '\n';
    for (std::size_t i = 0; i < g.xs.size(); ++i) {
        const auto& s = g.states[i];
        const bool ok = g.diagnostics[i].ok;
        const double nan = std::nan("");
        os << fmt(g.xs[i]) << ',' << fmt(ok ? g.fs[i] : nan) << ',' << fmt(s.m_rho.real()) << ','
           << fmt(s.m_rho.imag()) << ',' << fmt(s.omega_mu.real()) << ',' << fmt(s.omega_mu.imag()) << ','
           << fmt(s.omega_nu.real()) << ',' << fmt(s.omega_nu.imag()) << ',' << fmt(s.residual) << '\n';
    }
}

std::string atoms_json(const AtomReport& atoms) {
    json j;
    j["atoms"] = json::array();
    for (const auto& e : atoms.entries) {
        json a;
        a["c"] = raw_number(e.c);
        a["mass"] = raw_number(e.mass);
        if (e.at_zero) {
            a["witness"] = "zero";
        } else {
            a["witness"] = json::array({raw_number(e.u), raw_number(e.v)});
        }
        j["atoms"].push_back(a);
    }
    j["total_mass"] = raw_number(atoms.total_mass());
    return j.dump(2);
}

std::string edges_json(const SupportInfo& info) {
    json j;
    j["E_minus"] = raw_number(info.E_minus);
    j["E_plus"] = raw_number(info.E_plus);
    j["omega_mu"] = json::array({raw_number(info.omega_mu_at.first), raw_number(info.omega_mu_at.second)});
    j["omega_nu"] = json::array({raw_number(info.omega_nu_at.first), raw_number(info.omega_nu_at.second)});
    j["gamma"] = {{"mu_minus", raw_number(info.gamma_mu.first)},
                  {"mu_plus", raw_number(info.gamma_mu.second)},
                  {"nu_minus", raw_number(info.gamma_nu.first)},
                  {"nu_plus", raw_number(info.gamma_nu.second)}};
    j["residuals"] = json::array({raw_number(info.residuals.first), raw_number(info.residuals.second)});
    j["scan_edges"] = json::array({raw_number(info.scan_edges.first), raw_number(info.scan_edges.second)});
    return j.dump(2);
}

}  // namespace fmc
