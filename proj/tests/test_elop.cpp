#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/elop.hpp"
#include "specbound/gen.hpp"

using namespace specbound;

namespace {

CMat unit(int n, int i, int j) {
    CMat e = CMat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

double map_distance(const ElOp& s, const ElOp& t) {
    return (superoperator_matrix(s) - superoperator_matrix(t)).norm();
}

}  // namespace

TEST_CASE("apply pinned cases") {
    Rng rng(1);
    CMat x = random_gaussian(rng, 3, 3);
    CHECK((specbound::apply(ElOp::identity(3), x) - x).norm() <= 1e-12);

    ElOp pick{2, {{unit(2, 0, 0), unit(2, 0, 0)}}};
    CMat y(2, 2);
    y << 1, 2, 3, 4;
    CMat got = specbound::apply(pick, y);
    CHECK(std::abs(got(0, 0) - Complex(1, 0)) <= 1e-12);
    CHECK(got.norm() == doctest::Approx(1.0));

    ElOp shift{2, {{unit(2, 0, 1), CMat::Identity(2, 2)}}};
    CMat z(2, 2);
    z << 0, 0.01, 100, 0;
    CMat want = CMat::Zero(2, 2);
    want(0, 0) = 100.0;
    CHECK((specbound::apply(shift, z) - want).norm() <= 1e-10);
}

TEST_CASE("superoperator matrix") {
    CHECK((superoperator_matrix(ElOp::identity(2)) - CMat::Identity(4, 4)).norm() <= 1e-12);
    CHECK(superoperator_matrix(ElOp{3, {}}).norm() == doctest::Approx(0.0));
    ElOp s = gen_random(3, 2, 5);
    CMat m = superoperator_matrix(s);
    Rng rng(2);
    for (int t = 0; t < 10; ++t) {
        CMat x = random_gaussian(rng, 3, 3);
        CHECK((m * vec(x) - vec(specbound::apply(s, x))).norm() <= 1e-10 * (1.0 + x.norm() * m.norm()));
    }
}

TEST_CASE("length pinned cases") {
    Rng rng(3);
    CMat a = random_gaussian(rng, 3, 3);
    CMat b = random_gaussian(rng, 3, 3);
    CMat c = random_gaussian(rng, 3, 3);
    ElOp collapsed{3, {{a, b}, {a, c}}};
    CHECK(length(collapsed) == 1);
    CHECK(length(ElOp{3, {}}) == 0);
    CHECK(length(gen_random(4, 3, 7)) == 3);
}

TEST_CASE("minimal representation") {
    Rng rng(4);
    CMat a = random_gaussian(rng, 3, 3);
    CMat b = random_gaussian(rng, 3, 3);
    CMat c = random_gaussian(rng, 3, 3);
    ElOp collapsed{3, {{a, b}, {a, c}}};
    ElOp m = minimal_rep(collapsed);
    REQUIRE(m.terms.size() == 1);
    // a-part proportional to a
    CMat stacked(9, 2);
    stacked.col(0) = vec(a);
    stacked.col(1) = vec(m.terms[0].first);
    CHECK(numeric_rank(stacked) == 1);
    CHECK(map_distance(m, collapsed) <= 1e-9 * (1.0 + superoperator_matrix(collapsed).norm()));

    for (int t = 0; t < 20; ++t) {
        ElOp s = gen_random(3, 2, static_cast<std::uint64_t>(100 + t));
        s.terms.push_back(s.terms[0]);  // planted redundancy
        ElOp ms = minimal_rep(s);
        CHECK(static_cast<int>(ms.terms.size()) == length(s));
        CHECK(probe_distance(s, ms) <= 1e-9);
    }
}

TEST_CASE("star and compose") {
    ElOp s{2, {{unit(2, 0, 1), CMat::Identity(2, 2)}}};
    ElOp ss = star(s);
    CHECK((ss.terms[0].first - CMat::Identity(2, 2)).norm() <= 1e-12);
    CHECK(map_distance(star(ss), s) <= 1e-12);
    CHECK((specbound::apply(ss, CMat::Identity(2, 2)) - unit(2, 0, 1)).norm() <= 1e-12);

    ElOp t = gen_random(3, 2, 9);
    CHECK(map_distance(compose(ElOp::identity(3), t), t) <= 1e-10);
    CHECK(superoperator_matrix(compose(t, ElOp{3, {}})).norm() == doctest::Approx(0.0));
    ElOp u = gen_random(3, 3, 10);
    CMat prod = superoperator_matrix(t) * superoperator_matrix(u);
    CHECK((superoperator_matrix(compose(t, u)) - prod).norm() <= 1e-9 * (1.0 + prod.norm()));
}

TEST_CASE("trace vector") {
    CHECK((trace_vector(ElOp::identity(3)) - CMat::Identity(3, 3)).norm() <= 1e-12);
    ElOp s{2, {{unit(2, 0, 1), CMat::Identity(2, 2)}}};
    CHECK((trace_vector(s) - unit(2, 0, 1)).norm() <= 1e-12);
    // representation coherence: recombined reps agree on the trace vector
    for (int t = 0; t < 10; ++t) {
        ElOp r = gen_random(3, 3, static_cast<std::uint64_t>(200 + t));
        Rng rng(static_cast<std::uint64_t>(t));
        ElOp rec = recombine(r, random_invertible(rng, 3));
        CHECK((trace_vector(r) - trace_vector(rec)).norm() <=
              1e-9 * (1.0 + trace_vector(r).norm()));
        CHECK((trace_vector(r) - trace_vector(minimal_rep(r))).norm() <=
              1e-9 * (1.0 + trace_vector(r).norm()));
    }
}

TEST_CASE("coefficient spaces") {
    ElOpSpaces sp = spaces(ElOp::identity(4));
    CHECK(sp.L.dim == 1);
    CHECK(sp.R.dim == 1);
    CHECK(sp.V.dim == 1);
    CHECK(sp.Vp.dim == 1);
    CHECK(sp.L.local_dim == 1);
    CHECK(sp.Vp.local_dim == 1);

    ElOp shared{2, {{unit(2, 0, 0), unit(2, 1, 0)}, {unit(2, 0, 1), unit(2, 0, 1)}}};
    CHECK(spaces(shared).L.local_dim == 1);  // both ranges inside C e1

    ElOpSpaces rs = spaces(gen_random(4, 3, 11));
    CHECK(rs.Vp.dim <= 10);
    CHECK(rs.Vp.local_dim <= 4);
    REQUIRE(rs.Vp.separating_vector.has_value());
}

TEST_CASE("recombine") {
    ElOp s = gen_random(3, 3, 12);
    CHECK(map_distance(recombine(s, CMat::Identity(3, 3)), s) <= 1e-10);

    CMat perm = CMat::Zero(3, 3);
    perm(0, 1) = perm(1, 2) = perm(2, 0) = 1.0;
    ElOp p = recombine(s, perm);
    CHECK((p.terms[0].first - s.terms[1].first).norm() <= 1e-10);

    Rng rng(6);
    ElOp r = recombine(s, random_invertible(rng, 3));
    CHECK(probe_distance(s, r) <= 1e-9);
    CHECK(length(r) == length(s));
    CHECK_THROWS_AS(recombine(s, CMat::Zero(3, 3)), MatError);
}

TEST_CASE("product grid") {
    ProductGrid g1 = product_grid(ElOp::identity(3));
    CHECK(g1.n_terms == 1);
    CHECK((g1.at(0, 0) - CMat::Identity(3, 3)).norm() <= 1e-12);

    ElOp s = gen_random(3, 3, 13);
    ProductGrid g = product_grid(s);
    CMat diag_sum = CMat::Zero(3, 3);
    for (int i = 0; i < 3; ++i) diag_sum += g.at(i, i);
    CHECK((diag_sum - trace_vector(s)).norm() <= 1e-10 * (1.0 + diag_sum.norm()));

    ElOp zero_grid{3, {{unit(3, 0, 0), unit(3, 0, 1)}, {unit(3, 0, 2), unit(3, 1, 1)}}};
    ProductGrid gz = product_grid(zero_grid);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(gz.at(i, j).norm() <= 1e-12);
}

TEST_CASE("grid realizability") {
    // three lambda*I diagonal blocks: block rank 3n > n, not realizable
    ProductGrid bad;
    bad.n_terms = 3;
    bad.ambient_dim = 3;
    bad.entries.assign(3, std::vector<CMat>(3, CMat::Zero(3, 3)));
    for (int i = 0; i < 3; ++i) bad.entries[i][i] = 2.0 * CMat::Identity(3, 3);
    CHECK_FALSE(grid_realizable(bad).has_value());

    ProductGrid zero;
    zero.n_terms = 2;
    zero.ambient_dim = 3;
    zero.entries.assign(2, std::vector<CMat>(2, CMat::Zero(3, 3)));
    auto z = grid_realizable(zero);
    REQUIRE(z.has_value());

    ProductGrid g = make_form_grid(2, 4, Complex(0, 0), 21);
    auto uv = grid_realizable(g);
    REQUIRE(uv.has_value());
    auto& [us, vs] = *uv;
    double sc = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sc = std::max(sc, g.at(i, j).norm());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK((vs[static_cast<std::size_t>(i)] * us[static_cast<std::size_t>(j)] - g.at(i, j))
                      .norm() <= 1e-8 * sc);
}

TEST_CASE("linearity of apply") {
    ElOp s = gen_random(3, 3, 14);
    Rng rng(8);
    for (int t = 0; t < 10; ++t) {
        CMat x = random_gaussian(rng, 3, 3);
        CMat y = random_gaussian(rng, 3, 3);
        Complex al(0.3, -1.2), be(2.0, 0.7);
        CMat lhs = specbound::apply(s, al * x + be * y);
        CMat rhs = al * specbound::apply(s, x) + be * specbound::apply(s, y);
        CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }
}

TEST_CASE("generators verify their structure") {
    TriangularGen tg = gen_triangular(4, 3, 31);
    ProductGrid g = product_grid(tg.op);
    double sc = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sc = std::max(sc, g.at(i, j).norm());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) CHECK(g.at(i, j).norm() <= 1e-9 * sc);

    CHECK(length(gen_form2(4, 32).op) == 3);
    CHECK(length(gen_form3(5, 33).op) == 3);
    CHECK_THROWS_AS(gen_form2(3, 1), MatError);
    CHECK_THROWS_AS(gen_form3(3, 1), MatError);
    CHECK(length(gen_length2_good(3, 34)) == 2);
    CHECK_FALSE(scalar_of_identity(trace_vector(gen_unbounded(3, 2, 35))).has_value());
    ProductGrid gz = product_grid(gen_zero_grid(4, 3, 36));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(gz.at(i, j).norm() <= 1e-8);
}
