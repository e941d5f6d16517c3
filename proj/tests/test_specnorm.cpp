#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/gen.hpp"
#include "specbound/specnorm.hpp"

using namespace specbound;

namespace {

CMat unit(int n, int i, int j) {
    CMat e = CMat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

}  // namespace

TEST_CASE("ratio pinned cases") {
    Rng rng(1);
    CMat x = random_gaussian(rng, 3, 3);
    auto r1 = ratio(ElOp::identity(3), x);
    REQUIRE(r1.has_value());
    CHECK(*r1 == doctest::Approx(1.0).epsilon(1e-10));

    ElOp shift{2, {{unit(2, 0, 1), CMat::Identity(2, 2)}}};
    CMat xk(2, 2);
    xk << 0, 0.01, 100, 0;
    auto r2 = ratio(shift, xk);
    REQUIRE(r2.has_value());
    CHECK(*r2 == doctest::Approx(100.0).epsilon(1e-10));

    CHECK_FALSE(ratio(shift, unit(2, 0, 1)).has_value());  // nilpotent denominator
}

TEST_CASE("ratio clamps numerically nilpotent images to zero") {
    ElOp z = gen_zero_grid(4, 3, 2);
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
        auto r = ratio(z, random_gaussian(rng, 4, 4));
        if (r) CHECK(*r == 0.0);
    }
}

TEST_CASE("spectral norm estimate") {
    NormEstimate id = estimate_spectral_norm(ElOp::identity(3), 200, 0);
    CHECK(id.lower_bound == doctest::Approx(1.0).epsilon(1e-9));

    // vu = 2I forces ratio == 2 identically
    Rng rng(4);
    CMat u = random_invertible(rng, 3);
    ElOp two{3, {{u, CMat(2.0 * u.inverse())}}};
    NormEstimate e2 = estimate_spectral_norm(two, 300, 0);
    CHECK(e2.lower_bound == doctest::Approx(2.0).epsilon(1e-3));

    ElOp bad = gen_unbounded(3, 2, 5);
    NormEstimate eb = estimate_spectral_norm(bad, 10000, 0);
    CHECK(eb.lower_bound > 1e3);
}

TEST_CASE("monotone reporting in the budget") {
    ElOp s = gen_random(3, 2, 6);
    double prev = 0.0;
    for (int budget : {50, 200, 800}) {
        double lb = estimate_spectral_norm(s, budget, 123).lower_bound;
        CHECK(lb >= prev - 1e-12);
        prev = lb;
    }
}

TEST_CASE("blowup search pinned cases") {
    ElOp shift{2, {{unit(2, 0, 1), CMat::Identity(2, 2)}}};
    auto w = search_blowup(shift, 1e3, 10000, 0);
    REQUIRE(w.has_value());
    CHECK(w->ratios.back() >= 1e3);
    CHECK(verify_witness(shift, *w));
    for (std::size_t i = 1; i < w->ratios.size(); ++i) CHECK(w->ratios[i] > w->ratios[i - 1]);

    CHECK_FALSE(search_blowup(ElOp::identity(3), 2.0, 2000, 0).has_value());

    TriangularGen tg = gen_triangular(4, 1, 7);
    double bound = std::abs(tg.lambdas[0]);
    CHECK_FALSE(
        search_blowup(tg.op, std::max(bound * (1.0 + 1e-3), 1e-3), 3000, 0).has_value());
}

TEST_CASE("witness verification rejects tampering") {
    ElOp shift{2, {{unit(2, 0, 1), CMat::Identity(2, 2)}}};
    auto w = search_blowup(shift, 1e3, 10000, 0);
    REQUIRE(w.has_value());
    BlowupWitness bad = *w;
    bad.ratios.back() *= 2.0;  // no longer recomputable from its x
    CHECK_FALSE(verify_witness(shift, bad));
}

TEST_CASE("infinitesimal probe") {
    ElOp z = gen_zero_grid(4, 3, 8);
    CHECK(infinitesimal_probe(z, 64, 0));
    CHECK(trace_vector(z).norm() <= 1e-8);
    CHECK_FALSE(infinitesimal_probe(ElOp::identity(3), 16, 0));
}
