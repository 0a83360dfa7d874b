#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "fmc/density.hpp"
#include "fmc/errors.hpp"
#include "fmc/io.hpp"
#include "fmc/measure.hpp"

using namespace fmc;

TEST_CASE("measure specs round trip") {
    const auto m = parse_measure(
        R"({"atoms": [{"x": 0.5, "w": 0.3}], "jacobi": [{"lo": 1, "hi": 2.5, "t_lo": -0.3, "t_hi": 0.4, "weight": 0.7}]})");
    REQUIRE(m.atoms().size() == 1);
    REQUIRE(m.components().size() == 1);
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const auto back = parse_measure(measure_to_json(m));
    for (int k = 1; k <= 4; ++k) CHECK(back.moment(k) == doctest::Approx(m.moment(k)).epsilon(1e-14));
}

TEST_CASE("malformed or invalid specs") {
    CHECK_THROWS_AS(parse_measure(R"({"atoms": [{"x": 1, "w": 1})"), DomainError);
    CHECK_THROWS_AS(parse_measure(R"({"atoms": [{"x": 1, "w": 0.9}]})"), DomainError);
    CHECK_THROWS_AS(parse_measure(R"({"atoms": [{"x": 1, "w": 1}], "extra": 3})"), DomainError);
    CHECK_THROWS_AS(parse_measure(R"({"atoms": [{"x": -1, "w": 1}]})"), DomainError);
    CHECK_THROWS_AS(parse_measure(R"({"jacobi": [{"lo": 1, "hi": 2, "t_lo": 0, "weight": 1}]})"), DomainError);
    CHECK_THROWS_AS(parse_measure(R"({"jacobi": [{"lo": 1, "hi": 2, "t_lo": -1.5, "t_hi": 0, "weight": 1}]})"),
                    DomainError);
    CHECK_THROWS_AS(parse_measure("[]"), DomainError);
    CHECK_THROWS_AS(load_measure("/nonexistent/spec.json"), DomainError);
}

TEST_CASE("density CSV") {
    const auto d1 = point_mass(1.0);
    const auto g = density_grid(d1, d1, 0.5, 1.5, 3);
    std::ostringstream os;
    write_density_csv(os, g);
    const std::string s = os.str();
    CHECK(s.rfind(std::string(kDensityCsvHeader) + "\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}

TEST_CASE("atoms JSON") {
    const Measure b({{0.0, 0.5}, {2.0, 0.5}}, {});
    const auto j = nlohmann::json::parse(atoms_json(atoms(b, b)));
    REQUIRE(j["atoms"].size() == 1);
    CHECK(j["atoms"][0]["witness"] == "zero");
    CHECK(j["atoms"][0]["c"].get<double>() == 0.0);
    CHECK(j["total_mass"].get<double>() == 0.5);
}
