#include "specbound/gen.hpp"

#include <cmath>

namespace specbound {

namespace {

void check_grid(const ElOp& op, const std::vector<std::vector<CMat>>& want, double scale) {
    ProductGrid g = product_grid(op);
    for (int i = 0; i < g.n_terms; ++i)
        for (int j = 0; j < g.n_terms; ++j)
            if ((g.at(i, j) - want[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                    .norm() > 1e-9 * scale)
                throw MatError("generator: structural equations violated");
}

}  // namespace

TriangularGen gen_triangular(int n, int k, std::uint64_t seed) {
    if (n < 2 || k < 1) throw MatError("gen_triangular: need n >= 2 and k >= 1");
    if (k >= 2 && k >= n) throw MatError("gen_triangular: k >= 2 needs k < n");
    Rng rng(child_seed(seed, "gen_triangular"));
    TriangularGen out;

    if (k == 1) {
        std::uniform_real_distribution<double> unif(0.0, 3.0);
        double lam = unif(rng);
        CMat a, b;
        if (lam >= 1e-3) {
            a = random_invertible(rng, n);
            b = lam * a.inverse();
        } else {
            lam = 0.0;
            CVec w = random_gaussian_vec(rng, n);
            w.normalize();
            a = w * random_gaussian(rng, 1, n);
            b = random_gaussian(rng, n, n) * (CMat::Identity(n, n) - w * w.adjoint());
        }
        out.op = ElOp{n, {{a, b}}};
        out.lambdas = {Complex(lam, 0.0)};
        CMat ba = b * a;
        if ((ba - lam * CMat::Identity(n, n)).norm() > 1e-9 * std::max(1.0, ba.norm()))
            throw MatError("gen_triangular: structural equations violated");
        return out;
    }

    // flag construction: range(u_j) in W_j, ker(v_i) contains W_i, so the
    // grid is zero on and below the diagonal
    CMat q = random_invertible(rng, n);
    CMat qinv = q.inverse();
    out.op.dim = n;
    for (int j = 1; j <= k; ++j)
        out.op.terms.emplace_back(q.leftCols(j) * random_gaussian(rng, j, n), CMat());
    for (int i = 1; i <= k; ++i)
        out.op.terms[static_cast<std::size_t>(i - 1)].second =
            random_gaussian(rng, n, n - i) * qinv.bottomRows(n - i);
    out.lambdas.assign(static_cast<std::size_t>(k), Complex(0.0, 0.0));

    ProductGrid g = product_grid(out.op);
    double sc = 1.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sc = std::max(sc, g.at(i, j).norm());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j)
            if (g.at(i, j).norm() > 1e-9 * sc)
                throw MatError("gen_triangular: structural equations violated");
    return out;
}

Form2Gen gen_form2(int n, std::uint64_t seed) {
    if (n < 4) throw MatError("gen_form2: requires n >= 4");
    Rng rng(child_seed(seed, "gen_form2"));
    Form2Gen out;
    out.zeta0 = random_gaussian_vec(rng, n);
    out.zeta1 = random_gaussian_vec(rng, n);
    out.f = random_gaussian_vec(rng, n);
    CVec e1 = random_gaussian_vec(rng, n);
    CVec e2 = random_gaussian_vec(rng, n);
    CVec e3 = random_gaussian_vec(rng, n);
    CVec zero = CVec::Zero(n);
    std::uint64_t ps = child_seed(seed, "gen_form2_v");

    CMat u1 = e1 * out.f.transpose();
    CMat u2 = e2 * out.f.transpose();
    CMat u3 = e3 * out.f.transpose();
    CMat v1 = prescribe({{e1, zero}, {e2, out.zeta1}, {e3, zero}}, n, false, ps);
    CMat v2 = prescribe({{e1, out.zeta0}, {e2, zero}, {e3, out.zeta1}}, n, false, ps);
    CMat v3 = prescribe({{e1, zero}, {e2, CVec(-out.zeta0)}, {e3, zero}}, n, false, ps);
    out.op = ElOp{n, {{u1, v1}, {u2, v2}, {u3, v3}}};

    CMat Z0 = out.zeta0 * out.f.transpose();
    CMat Z1 = out.zeta1 * out.f.transpose();
    CMat z = CMat::Zero(n, n);
    check_grid(out.op, {{z, Z1, z}, {Z0, z, Z1}, {z, CMat(-Z0), z}},
               std::max(1.0, std::max(Z0.norm(), Z1.norm())));
    return out;
}

Form3Gen gen_form3(int n, std::uint64_t seed) {
    if (n < 4) throw MatError("gen_form3: requires n >= 4");
    Rng rng(child_seed(seed, "gen_form3"));
    Form3Gen out;
    out.zeta0 = random_gaussian_vec(rng, n);
    out.f = random_gaussian_vec(rng, n);
    out.g = random_gaussian_vec(rng, n);
    CVec w1 = random_gaussian_vec(rng, n);
    CVec e = random_gaussian_vec(rng, n);
    CVec w3 = random_gaussian_vec(rng, n);
    CVec zero = CVec::Zero(n);
    std::uint64_t ps = child_seed(seed, "gen_form3_u");

    // the u_j are prescribed through their transposes: w^T u = (u^T w)^T
    CMat u1 = prescribe({{w1, zero}, {e, out.f}, {w3, zero}}, n, false, ps).transpose();
    CMat u2 = prescribe({{w1, out.g}, {e, zero}, {w3, CVec(-out.f)}}, n, false, ps).transpose();
    CMat u3 = prescribe({{w1, zero}, {e, out.g}, {w3, zero}}, n, false, ps).transpose();
    CMat v1 = out.zeta0 * w1.transpose();
    CMat v2 = out.zeta0 * e.transpose();
    CMat v3 = out.zeta0 * w3.transpose();
    out.op = ElOp{n, {{u1, v1}, {u2, v2}, {u3, v3}}};

    CMat Z0 = out.zeta0 * out.f.transpose();
    CMat Z1 = out.zeta0 * out.g.transpose();
    CMat z = CMat::Zero(n, n);
    check_grid(out.op, {{z, Z1, z}, {Z0, z, Z1}, {z, CMat(-Z0), z}},
               std::max(1.0, std::max(Z0.norm(), Z1.norm())));
    return out;
}

ElOp gen_random(int n, int k, std::uint64_t seed) {
    if (n < 2 || k < 1) throw MatError("gen_random: need n >= 2 and k >= 1");
    Rng rng(child_seed(seed, "gen_random"));
    ElOp out{n, {}};
    for (int i = 0; i < k; ++i)
        out.terms.emplace_back(random_gaussian(rng, n, n), random_gaussian(rng, n, n));
    return out;
}

ElOp gen_length2_good(int n, std::uint64_t seed) {
    if (n < 3) throw MatError("gen_length2_good: requires n >= 3");
    Rng rng(child_seed(seed, "gen_length2_good"));
    CVec w1 = random_gaussian_vec(rng, n);
    CVec w2 = random_gaussian_vec(rng, n);
    CMat a = w1 * random_gaussian(rng, 1, n);
    CMat c = w2 * random_gaussian(rng, 1, n);
    CMat W(n, 2);
    W << w1, w2;
    Eigen::HouseholderQR<CMat> qr(W);
    CMat qw = qr.householderQ() * CMat::Identity(n, 2);
    CMat b = random_gaussian(rng, n, n) * (CMat::Identity(n, n) - qw * qw.adjoint());
    CVec q2 = w2 / w2.norm();
    CMat d = random_gaussian(rng, n, n) * (CMat::Identity(n, n) - q2 * q2.adjoint());
    ElOp out{n, {{a, b}, {c, d}}};

    double sc = std::max({1.0, (b * a).norm(), (d * a).norm()});
    if ((b * a).norm() > 1e-9 * sc || (d * c).norm() > 1e-9 * sc ||
        (b * c).norm() > 1e-9 * sc)
        throw MatError("gen_length2_good: structural equations violated");
    return out;
}

ElOp gen_unbounded(int n, int k, std::uint64_t seed) {
    for (int attempt = 0; attempt < 32; ++attempt) {
        ElOp cand = gen_random(n, k, child_seed(seed, static_cast<std::uint64_t>(attempt)));
        if (!scalar_of_identity(trace_vector(cand)).has_value()) return cand;
    }
    throw MatError("gen_unbounded: could not draw a non-central operator");
}

ElOp gen_zero_grid(int n, int k, std::uint64_t seed) {
    int w = n / 2;
    if (n < 4 || k > w * n) throw MatError("gen_zero_grid: need n >= 4");
    Rng rng(child_seed(seed, "gen_zero_grid"));
    CMat q = random_invertible(rng, n);
    CMat qw = q.leftCols(w);
    Eigen::HouseholderQR<CMat> qr(qw);
    CMat qo = qr.householderQ() * CMat::Identity(n, w);
    ElOp out{n, {}};
    for (int i = 0; i < k; ++i)
        out.terms.emplace_back(qw * random_gaussian(rng, w, n),
                               random_gaussian(rng, n, n) *
                                   (CMat::Identity(n, n) - qo * qo.adjoint()));
    ProductGrid g = product_grid(out);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (g.at(i, j).norm() > 1e-9 * (1.0 + out.terms[0].first.norm()))
                throw MatError("gen_zero_grid: structural equations violated");
    return out;
}

ProductGrid make_form_grid(int form, int n, Complex lambda, std::uint64_t seed) {
    if (form != 2 && form != 3) throw MatError("make_form_grid: form must be 2 or 3");
    Rng rng(child_seed(seed, "make_form_grid"));
    CVec zeta0 = random_gaussian_vec(rng, n);
    CVec other = random_gaussian_vec(rng, n);
    CVec f = random_gaussian_vec(rng, n);
    CMat Z0 = zeta0 * f.transpose();
    CMat Z1 = (form == 2) ? CMat(other * f.transpose()) : CMat(zeta0 * other.transpose());
    CMat li = lambda * CMat::Identity(n, n);
    ProductGrid g;
    g.n_terms = 3;
    g.ambient_dim = n;
    g.entries = {{li, Z1, CMat::Zero(n, n)},
                 {Z0, li, Z1},
                 {CMat::Zero(n, n), CMat(-Z0), li}};
    return g;
}

}  // namespace specbound
