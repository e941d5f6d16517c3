#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/matcore.hpp"

using namespace specbound;

namespace {

CMat unit(int n, int i, int j) {
    CMat e = CMat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

}  // namespace

TEST_CASE("spectral radius on pinned matrices") {
    CHECK(spectral_radius(unit(2, 0, 1)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spectral_radius(CMat::Identity(5, 5)) == doctest::Approx(1.0));
    CMat d = CMat::Zero(2, 2);
    d(0, 0) = Complex(2, 0);
    d(1, 1) = Complex(0, -3);
    CHECK(spectral_radius(d) == doctest::Approx(3.0));
}

TEST_CASE("spectral radius similarity and commutation invariance") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        CMat x = random_gaussian(rng, 5, 5);
        CMat y = random_gaussian(rng, 5, 5);
        CMat u = random_invertible(rng, 5);
        double rx = spectral_radius(x);
        CHECK(spectral_radius(u * x * u.inverse()) ==
              doctest::Approx(rx).epsilon(1e-8));
        CHECK(spectral_radius(x * y) ==
              doctest::Approx(spectral_radius(y * x)).epsilon(1e-8));
    }
}

TEST_CASE("numeric rank") {
    CHECK(numeric_rank(CMat::Zero(3, 3)) == 0);
    CHECK(numeric_rank(CMat::Identity(4, 4)) == 4);
    Rng rng(11);
    CVec a = random_gaussian_vec(rng, 6), b = random_gaussian_vec(rng, 6);
    CMat outer = a * b.transpose();
    CHECK(numeric_rank(outer) == 1);
    // oracle: every 2x2 Gram determinant of a pair of rows vanishes
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            Complex det = outer.row(i).dot(outer.row(i)) * outer.row(j).dot(outer.row(j)) -
                          outer.row(i).dot(outer.row(j)) * outer.row(j).dot(outer.row(i));
            CHECK(std::abs(det) <= 1e-10 * (1.0 + std::pow(outer.norm(), 4)));
        }
}

TEST_CASE("numerically nilpotent detection") {
    Rng rng(3);
    CMat m = random_gaussian(rng, 4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = 0.0;
    CHECK(numerically_nilpotent(m));
    CHECK_FALSE(numerically_nilpotent(CMat::Identity(4, 4)));
    CHECK_FALSE(numerically_nilpotent(random_gaussian(rng, 4, 4)));
}

TEST_CASE("scalar of identity") {
    auto s = scalar_of_identity(2.5 * CMat::Identity(3, 3));
    REQUIRE(s.has_value());
    CHECK(std::abs(*s - 2.5) <= 1e-12);
    CHECK_FALSE(scalar_of_identity(unit(2, 0, 1)).has_value());
    CMat near = CMat::Identity(2, 2) + 1e-12 * unit(2, 0, 1);
    auto t = scalar_of_identity(near);
    REQUIRE(t.has_value());
    CHECK(std::abs(*t - 1.0) <= 1e-10);
}

TEST_CASE("vec / unvec / kron consistency: vec(axb) = (b^T (x) a) vec(x)") {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        CMat a = random_gaussian(rng, 3, 3);
        CMat b = random_gaussian(rng, 3, 3);
        CMat x = random_gaussian(rng, 3, 3);
        CVec lhs = vec(a * x * b);
        CVec rhs = kron(b.transpose(), a) * vec(x);
        CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
        CHECK((unvec(vec(x), 3, 3) - x).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("prescribe pinned cases") {
    CVec e1 = CVec::Zero(2), e2 = CVec::Zero(2);
    e1(0) = 1.0;
    e2(1) = 1.0;

    CMat x = prescribe({{e1, CVec(2.0 * e1)}}, 2, true);
    CHECK((x * e1 - 2.0 * e1).norm() <= 1e-10);
    CHECK(numeric_rank(x) == 2);

    CMat y = prescribe({{e1, CVec(0.1 * e2)}, {e2, e1}}, 2, true);
    CMat want(2, 2);
    want << 0, 1, 0.1, 0;
    CHECK((y - want).norm() <= 1e-10);

    // x e1 = e1 and x(e1+e2) = e1 force x e2 = 0; no invertible completion
    CHECK_THROWS_AS(prescribe({{e1, e1}, {CVec(e1 + e2), e1}}, 2, true), MatError);
}

TEST_CASE("prescribe residual property") {
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        std::vector<std::pair<CVec, CVec>> cons;
        for (int i = 0; i < 3; ++i)
            cons.emplace_back(random_gaussian_vec(rng, 5), random_gaussian_vec(rng, 5));
        CMat x = prescribe(cons, 5, t % 2 == 0, static_cast<std::uint64_t>(t));
        for (const auto& [z, w] : cons) CHECK((x * z - w).norm() <= 1e-10 * (1.0 + w.norm()));
        if (t % 2 == 0) CHECK(numeric_rank(x) == 5);
    }
}

TEST_CASE("matrix in basis") {
    CMat d = CMat::Zero(3, 3);
    d(0, 0) = 1;
    d(1, 1) = 2;
    d(2, 2) = 3;
    CVec e1 = CVec::Zero(3), e2 = CVec::Zero(3);
    e1(0) = 1;
    e2(1) = 1;
    CMat m = matrix_in_basis(d, {e1, e2});
    CMat want(2, 2);
    want << 1, 0, 0, 2;
    CHECK((m - want).norm() <= 1e-10);

    CMat m2 = matrix_in_basis(unit(3, 0, 1), {e1, e2});
    CMat want2(2, 2);
    want2 << 0, 1, 0, 0;
    CHECK((m2 - want2).norm() <= 1e-10);

    CHECK_THROWS_AS(matrix_in_basis(unit(3, 1, 0), {e1}), MatError);
}

TEST_CASE("seed derivation is deterministic and label-separated") {
    CHECK(child_seed(42, "a") == child_seed(42, "a"));
    CHECK(child_seed(42, "a") != child_seed(42, "b"));
    CHECK(child_seed(42, std::uint64_t{1}) != child_seed(42, std::uint64_t{2}));
    CHECK(child_seed(42, "a") != child_seed(43, "a"));
}

TEST_CASE("null space and orthonormal span") {
    Rng rng(17);
    CVec a = random_gaussian_vec(rng, 4);
    CVec b = random_gaussian_vec(rng, 4);
    CMat sp = orthonormal_span({a, b, CVec(a + b)});
    CHECK(sp.cols() == 2);
    CHECK((sp.adjoint() * sp - CMat::Identity(2, 2)).norm() <= 1e-10);

    CMat m = a * b.transpose();  // rank one, null space dim 3
    CMat ns = null_space(m);
    CHECK(ns.cols() == 3);
    CHECK((m * ns).norm() <= 1e-9 * (1.0 + m.norm()));
}

TEST_CASE("tolerance validation") {
    Tolerance t;
    CHECK_NOTHROW(t.validate());
    t.rank_rel = -1.0;
    CHECK_THROWS_AS(t.validate(), MatError);
}
