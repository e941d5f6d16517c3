#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/nilspace.hpp"

using namespace specbound;

namespace {

CMat unit(int n, int i, int j) {
    CMat e = CMat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

MatSpace strict_upper(int n) {
    MatSpace sp{n, {}};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) sp.basis.push_back(unit(n, i, j));
    return sp;
}

bool flag_triangularizes(const MatSpace& sp, const std::vector<CVec>& flag) {
    const int n = sp.ambient_dim;
    CMat w(n, n);
    for (int i = 0; i < n; ++i) w.col(i) = flag[static_cast<std::size_t>(i)];
    CMat wi = w.inverse();
    for (const CMat& m : sp.basis) {
        CMat t = wi * m * w;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                if (std::abs(t(i, j)) > 1e-8 * std::max(1.0, m.norm())) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("nilpotent space decision") {
    CHECK(is_nilpotent_space(MatSpace{3, {unit(3, 0, 1), unit(3, 0, 2)}}));
    CHECK_FALSE(is_nilpotent_space(MatSpace{2, {unit(2, 0, 0)}}));
    CMat skew = unit(2, 0, 1) + 1e-3 * unit(2, 1, 0);  // eigenvalues +-sqrt(1e-3)
    CHECK_FALSE(is_nilpotent_space(MatSpace{2, {skew}}));
}

TEST_CASE("nilpotency implies small sampled spectral radii") {
    MatSpace sp = strict_upper(4);
    REQUIRE(is_nilpotent_space(sp));
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        CMat m = CMat::Zero(4, 4);
        double scale = 0.0;
        for (const CMat& b : sp.basis) {
            std::normal_distribution<double> dist(0.0, 1.0);
            Complex c(dist(rng), dist(rng));
            m += c * b;
            scale += std::abs(c);
        }
        CHECK(spectral_radius(m) <= 1e-8 * (1.0 + scale));
    }
}

TEST_CASE("dimension bound report") {
    GerstenhaberReport full = gerstenhaber_check(strict_upper(4));
    CHECK(full.is_nilpotent);
    CHECK(full.dim == 6);
    CHECK(full.bound == 6);
    CHECK(full.saturated);

    GerstenhaberReport single = gerstenhaber_check(MatSpace{4, {unit(4, 0, 1)}});
    CHECK(single.is_nilpotent);
    CHECK(single.dim == 1);
    CHECK(single.bound == 6);
    CHECK_FALSE(single.saturated);

    Rng rng(2);
    GerstenhaberReport bad = gerstenhaber_check(MatSpace{3, {random_gaussian(rng, 3, 3)}});
    CHECK_FALSE(bad.is_nilpotent);
    CHECK_FALSE(bad.saturated);
}

TEST_CASE("random subspaces of the strict upper space respect the bound") {
    MatSpace big = strict_upper(5);
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        MatSpace sub{5, {}};
        int d = 1 + t % 5;
        std::vector<CVec> cols;
        for (int i = 0; i < d; ++i) {
            CMat m = CMat::Zero(5, 5);
            for (const CMat& b : big.basis) {
                std::normal_distribution<double> dist(0.0, 1.0);
                m += Complex(dist(rng), dist(rng)) * b;
            }
            cols.push_back(vec(m));
        }
        CMat on = orthonormal_span(cols);
        for (Eigen::Index c = 0; c < on.cols(); ++c) sub.basis.push_back(unvec(on.col(c), 5, 5));
        GerstenhaberReport r = gerstenhaber_check(sub);
        CHECK(r.is_nilpotent);
        CHECK(r.dim <= 10);
    }
}

TEST_CASE("triangularize") {
    MatSpace sp{3, {unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)}};
    auto flag = triangularize(sp);
    REQUIRE(flag.has_value());
    CHECK(flag_triangularizes(sp, *flag));

    Rng rng(4);
    CMat g = random_invertible(rng, 3);
    CMat gi = g.inverse();
    MatSpace conj{3, {}};
    for (const CMat& m : sp.basis) conj.basis.push_back(g * m * gi);
    auto cflag = triangularize(conj);
    REQUIRE(cflag.has_value());
    CHECK(flag_triangularizes(conj, *cflag));

    CHECK_THROWS_AS(triangularize(MatSpace{2, {unit(2, 0, 1), unit(2, 1, 0)}}), MatError);
}
