#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/gen.hpp"
#include "specbound/json_io.hpp"

using namespace specbound;

TEST_CASE("operator round trip") {
    ElOp s = gen_random(3, 2, 1);
    json j = operator_to_json(s);
    ElOp back = json_to_operator(j);
    CHECK(back.dim == 3);
    REQUIRE(back.terms.size() == 2);
    CHECK(probe_distance(s, back) <= 1e-12);
    CHECK(operator_to_json(back).dump() == j.dump());
}

TEST_CASE("parse errors name the offending field") {
    json j = operator_to_json(gen_random(2, 2, 2));
    j["terms"][1]["a"][0][1] = json::array({1.0});  // not [re, im]
    try {
        json_to_operator(j);
        FAIL("expected a parse error");
    } catch (const MatError& e) {
        CHECK(std::string(e.what()).find("terms[1].a[0][1]") != std::string::npos);
        CHECK(std::string(e.what()).find("expected [re, im]") != std::string::npos);
    }

    json bad_dim = operator_to_json(gen_random(2, 1, 3));
    bad_dim["dim"] = -1;
    CHECK_THROWS_WITH_AS(json_to_operator(bad_dim), doctest::Contains("dim"), MatError);

    json ragged = operator_to_json(gen_random(2, 1, 4));
    ragged["terms"][0]["b"][1] = json::array({json::array({1.0, 0.0})});
    CHECK_THROWS_AS(json_to_operator(ragged), MatError);
}

TEST_CASE("witness round trip") {
    BlowupWitness w;
    w.threshold = 1e3;
    w.ratios = {2.0, 5.0, 2000.0};
    Rng rng(5);
    for (int i = 0; i < 3; ++i) w.xs.push_back(random_gaussian(rng, 2, 2));
    w.construction = "orbit";
    w.seed = 7;
    BlowupWitness back = json_to_witness(witness_to_json(w), 2);
    CHECK(back.ratios == w.ratios);
    CHECK(back.construction == "orbit");
    CHECK(back.seed == 7);
    REQUIRE(back.xs.size() == 3);
    for (int i = 0; i < 3; ++i)
        CHECK((back.xs[static_cast<std::size_t>(i)] - w.xs[static_cast<std::size_t>(i)]).norm() <=
              1e-12);
    CHECK_THROWS_AS(json_to_witness(witness_to_json(w), 3), MatError);
}

TEST_CASE("verdict serialization is deterministic") {
    ElOp s = gen_form2(4, 6).op;
    Verdict v1 = classify(s, Tolerance{}, 5000, 9);
    Verdict v2 = classify(s, Tolerance{}, 5000, 9);
    json j1 = verdict_to_json(v1);
    json j2 = verdict_to_json(v2);
    CHECK(j1.dump() == j2.dump());
    CHECK(j1["status"] == "BOUNDED");
    CHECK(j1["form"] == "ii");
    CHECK(j1.contains("checks"));
    CHECK(j1.contains("budgets"));
    CHECK(j1["seed"] == 9);
}
