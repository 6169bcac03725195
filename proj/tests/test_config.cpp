#include <doctest.h>

#include "semiscat/config.hpp"
#include "semiscat/errors.hpp"

using namespace semiscat;

TEST_CASE("potential parsing round trip") {
    const json j = {{"kind", "truncated"},
                    {"R", 6.0},
                    {"base", {{"kind", "gaussian_barrier"}, {"E0", 1.0}, {"width", 1.0}}}};
    const Potential p = potential_from_json(j);
    CHECK(p.kind() == PotentialKind::Truncated);
    CHECK(p(0.0) == doctest::Approx(1.0));
    CHECK(p(20.0) == 0.0);
}

TEST_CASE("schema violations carry the field path") {
    json doc = {{"command", "smatrix"},
                {"potential", {{"kind", "square_barrier"}, {"height", 2.0}}}};
    try {
        parse_config(doc);
        FAIL("expected configuration_error");
    } catch (const configuration_error& e) {
        CHECK(std::string(e.what()).find("potential.halfwidth") != std::string::npos);
    }

    json bad_h = {{"command", "smatrix"}, {"h_list", {0.1, -0.2}}};
    CHECK_THROWS_AS(parse_config(bad_h), configuration_error);

    json no_cmd = {{"potential", {{"kind", "free"}}}};
    CHECK_THROWS_AS(parse_config(no_cmd), configuration_error);

    json bad_kind = {{"command", "x"}, {"potential", {{"kind", "bogus"}}}};
    CHECK_THROWS_AS(parse_config(bad_kind), configuration_error);
}

TEST_CASE("sweep lists and defaults") {
    json doc = {{"command", "ssf"},
                {"potential", {{"kind", "well_in_island"}}},
                {"h_list", {0.1, 0.05}},
                {"lambda_list", {0.5, 1.0, 1.5}},
                {"chi", {{"inner", 1.0}, {"outer", 2.0}}}};
    const ExperimentConfig cfg = parse_config(doc);
    CHECK(cfg.command == "ssf");
    CHECK(cfg.h_list.size() == 2);
    CHECK(cfg.lambda_list.size() == 3);
    const CutoffSpec chi = cutoff_from_config(cfg);
    CHECK(chi.outer == 2.0);
    CHECK(cfg.get_number("missing", 7.0) == 7.0);
}
