#include "specbound/selftest.hpp"

#include "specbound/gen.hpp"
#include "specbound/nilspace.hpp"

#include <chrono>
#include <cmath>
#include <functional>

namespace specbound {

namespace {

struct Ctx {
    bool quick = false;
    std::uint64_t seed = 0;
    Tolerance tol;
    // BOUNDED verdicts collected while running; suite 9 probes all of them.
    std::vector<ElOp> bounded_pool;
};

void fail(SuiteResult& r, const std::string& what) {
    ++r.failed;
    if (r.detail.empty()) r.detail = what;
}

void expect(SuiteResult& r, bool ok, const std::string& what) {
    ++r.checked;
    if (!ok) fail(r, what);
}

double op_scale(const ElOp& s) {
    double sc = 0.0;
    for (const auto& [a, b] : s.terms) sc += a.norm() * b.norm();
    return std::max(1.0, sc);
}

// Independent length oracle: rank of the Gram matrix of the rank-one
// tensors vec(a_i)vec(b_i)^T, by plain Gaussian elimination.
int gram_rank(const ElOp& s) {
    const auto k = static_cast<Eigen::Index>(s.terms.size());
    CMat g(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            g(i, j) = vec(s.terms[static_cast<std::size_t>(i)].first)
                          .dot(vec(s.terms[static_cast<std::size_t>(j)].first)) *
                      vec(s.terms[static_cast<std::size_t>(i)].second)
                          .dot(vec(s.terms[static_cast<std::size_t>(j)].second));
    double cutoff = 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff());
    int rank = 0;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < k && row < k; ++col) {
        Eigen::Index piv = row;
        for (Eigen::Index i = row + 1; i < k; ++i)
            if (std::abs(g(i, col)) > std::abs(g(piv, col))) piv = i;
        if (std::abs(g(piv, col)) <= cutoff) continue;
        g.row(row).swap(g.row(piv));
        for (Eigen::Index i = row + 1; i < k; ++i)
            g.row(i) -= (g(i, col) / g(row, col)) * g.row(row);
        ++rank;
        ++row;
    }
    return rank;
}

void classify_into_pool(Ctx& ctx, SuiteResult& r, const ElOp& op, const std::string& want_form,
                        std::uint64_t seed) {
    Verdict v = classify(op, ctx.tol, 10000, seed);
    expect(r, v.status == Status::BOUNDED,
           "expected BOUNDED, got " + std::string(to_string(v.status)));
    if (v.status != Status::BOUNDED) return;
    if (!want_form.empty())
        expect(r, v.certificate && v.certificate->form == want_form,
               "expected form " + want_form + ", got " +
                   (v.certificate ? v.certificate->form : std::string("none")));
    expect(r, verify_certificate(op, v, ctx.tol), "certificate failed re-verification");
    ctx.bounded_pool.push_back(op);
}

// 1: operators with a triangular grid obey r(Sx) <= max|lambda| r(x), and
// the blowup search cannot cross that bound.
SuiteResult suite_bound(Ctx& ctx) {
    SuiteResult r{1, "triangular-grid spectral bound", false, 0, 0, 0.0, ""};
    const int N = ctx.quick ? 20 : 200;
    const int probes = ctx.quick ? 20 : 200;
    const int budget = ctx.quick ? 1500 : 10000;
    std::uint64_t s = child_seed(ctx.seed, "suite1");
    for (int i = 0; i < N; ++i) {
        std::uint64_t cs = child_seed(s, static_cast<std::uint64_t>(i));
        int k = 1 + i % 3;
        TriangularGen g = gen_triangular(4, k, cs);
        double bound = 0.0;
        for (Complex l : g.lambdas) bound = std::max(bound, std::abs(l));
        Rng rng(child_seed(cs, "probes"));
        bool ok = true;
        for (int p = 0; p < probes; ++p) {
            CMat x = random_gaussian(rng, 4, 4);
            auto rr = ratio(g.op, x, ctx.tol);
            if (rr && *rr > bound + 1e-6) ok = false;
        }
        expect(r, ok, "probe ratio above max|lambda| (op " + std::to_string(i) + ")");
        double threshold = std::max(bound * 1.01, 1e-3);
        auto w = search_blowup(g.op, threshold, budget, child_seed(cs, "search"), ctx.tol);
        expect(r, !w.has_value(), "blowup search crossed the bound (op " + std::to_string(i) + ")");
        if (i < (ctx.quick ? 3 : 10))
            classify_into_pool(ctx, r, g.op, "i", child_seed(cs, "classify"));
    }
    return r;
}

// 2: non-central trace vector is falsified by search_blowup; the
// deterministic orbit family must carry at least 90% of the cases.
SuiteResult suite_trace_central(Ctx& ctx) {
    SuiteResult r{2, "trace-centrality falsifier", false, 0, 0, 0.0, ""};
    const int N = ctx.quick ? 8 : 50;
    std::uint64_t s = child_seed(ctx.seed, "suite2");
    int orbit_hits = 0;
    for (int i = 0; i < N; ++i) {
        std::uint64_t cs = child_seed(s, static_cast<std::uint64_t>(i));
        int n = 2 + i % 3;
        ElOp op = gen_unbounded(n, 1 + i % 3, cs);
        expect(r, !scalar_of_identity(trace_vector(op), ctx.tol).has_value(),
               "generated trace vector reads as central (op " + std::to_string(i) + ")");
        auto w = search_blowup(op, 1e3, 10000, child_seed(cs, "search"), ctx.tol);
        expect(r, w.has_value(), "no blowup witness found (op " + std::to_string(i) + ")");
        if (w) {
            expect(r, verify_witness(op, *w, ctx.tol),
                   "witness failed re-verification (op " + std::to_string(i) + ")");
            if (w->construction == "orbit") ++orbit_hits;
        }
    }
    expect(r, orbit_hits * 10 >= N * 9,
           "orbit family succeeded on only " + std::to_string(orbit_hits) + "/" +
               std::to_string(N));

    // closed-form case: S = M_{e12, I} on M_2; x_k = [[0, 1/k], [k, 0]]
    // has r(x_k) = 1 and S(x_k) = diag-free with r = k exactly.
    ElOp closed{2, {{(CMat(2, 2) << 0, 1, 0, 0).finished(), CMat::Identity(2, 2)}}};
    for (double k : {10.0, 100.0, 1000.0}) {
        CMat x(2, 2);
        x << 0, 1.0 / k, k, 0;
        auto rr = ratio(closed, x, ctx.tol);
        expect(r, rr && std::abs(*rr - k) <= 1e-6 * k,
               "closed-form ratio != k at k = " + std::to_string(k));
    }
    auto w = search_blowup(closed, 1e3, 10000, child_seed(s, "closed"), ctx.tol);
    expect(r, w && w->ratios.back() >= 1e3, "closed-form case: no witness past 1e3");
    return r;
}

// 3: the bounded length-2 normal form has (Sx)^3 = 0 and S*S = 0.
SuiteResult suite_length2(Ctx& ctx) {
    SuiteResult r{3, "length-2 consequences", false, 0, 0, 0.0, ""};
    const int N = ctx.quick ? 10 : 100;
    const int probes = ctx.quick ? 10 : 100;
    std::uint64_t s = child_seed(ctx.seed, "suite3");
    for (int i = 0; i < N; ++i) {
        std::uint64_t cs = child_seed(s, static_cast<std::uint64_t>(i));
        int n = 3 + i % 3;
        ElOp op = gen_length2_good(n, cs);
        double sc = op_scale(op);
        Rng rng(child_seed(cs, "probes"));
        bool cube_ok = true;
        for (int p = 0; p < probes; ++p) {
            CMat x = random_gaussian(rng, n, n);
            CMat sx = specbound::apply(op, x);
            double lim = 1e-8 * std::max(1.0, std::pow(sc * x.norm(), 3.0));
            if ((sx * sx * sx).norm() > lim) cube_ok = false;
        }
        expect(r, cube_ok, "(Sx)^3 != 0 (op " + std::to_string(i) + ")");
        CMat m = superoperator_matrix(compose(star(op), op));
        expect(r, m.norm() <= 1e-9 * sc * sc, "S*S != 0 (op " + std::to_string(i) + ")");
        if (i < (ctx.quick ? 3 : 10))
            classify_into_pool(ctx, r, op, "i", child_seed(cs, "classify"));
    }
    return r;
}

// 4: the 3x3 rank-one grid forms satisfy S*S = 3 lambda^2 I at grid level,
// for general lambda.
SuiteResult suite_grid_identity(Ctx& ctx) {
    SuiteResult r{4, "grid identity S*S = 3 lambda^2 I", false, 0, 0, 0.0, ""};
    const int N = ctx.quick ? 12 : 100;
    const int probes = ctx.quick ? 5 : 20;
    const Complex lams[4] = {{0, 0}, {1, 0}, {2, 0}, {1, 1}};
    std::uint64_t s = child_seed(ctx.seed, "suite4");
    for (int i = 0; i < N; ++i) {
        std::uint64_t cs = child_seed(s, static_cast<std::uint64_t>(i));
        int form = 2 + i % 2;
        Complex lam = lams[(i / 2) % 4];
        int n = 4 + i % 3;
        ProductGrid g = make_form_grid(form, n, lam, cs);
        ElOp t = grid_star_product(g);
        double gsc = 0.0;
        for (int a = 0; a < g.n_terms; ++a)
            for (int b = 0; b < g.n_terms; ++b) gsc = std::max(gsc, g.at(a, b).norm());
        Rng rng(child_seed(cs, "probes"));
        bool ok = true;
        for (int p = 0; p < probes; ++p) {
            CMat x = random_gaussian(rng, n, n);
            CMat res = specbound::apply(t, x) - 3.0 * lam * lam * x;
            if (res.norm() > 1e-8 * std::max(1.0, gsc * gsc) * x.norm()) ok = false;
        }
        expect(r, ok, "grid star product != 3 lambda^2 I (case " + std::to_string(i) + ")");
    }
    return r;
}

// 5: the strictly upper triangular space of M_4 saturates the n(n-1)/2
// nilpotency bound and triangularizes back after conjugation; subspaces
// stay below the bound; adding a diagonal unit breaks nilpotency.
SuiteResult suite_gerstenhaber(Ctx& ctx) {
    SuiteResult r{5, "nilpotent-space dimension bound", false, 0, 0, 0.0, ""};
    const int n = 4;
    std::uint64_t s = child_seed(ctx.seed, "suite5");
    MatSpace upper{n, {}};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            CMat e = CMat::Zero(n, n);
            e(i, j) = 1.0;
            upper.basis.push_back(e);
        }
    expect(r, is_nilpotent_space(upper, ctx.tol), "strict upper space not nilpotent");
    GerstenhaberReport gr = gerstenhaber_check(upper, ctx.tol);
    expect(r, gr.is_nilpotent && gr.dim == 6 && gr.bound == 6 && gr.saturated,
           "saturation report wrong for the strict upper space");

    Rng rng(child_seed(s, "conj"));
    CMat g = random_invertible(rng, n);
    CMat gi = g.inverse();
    MatSpace conj{n, {}};
    for (const CMat& m : upper.basis) conj.basis.push_back(g * m * gi);
    auto flag = triangularize(conj, ctx.tol);
    expect(r, flag.has_value(), "triangularize failed after conjugation");
    if (flag) {
        CMat w(n, n);
        for (int i = 0; i < n; ++i) w.col(i) = (*flag)[static_cast<std::size_t>(i)];
        CMat wi = w.inverse();
        bool tri = true;
        for (const CMat& m : conj.basis) {
            CMat t = wi * m * w;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j)
                    if (std::abs(t(i, j)) > 1e-8 * std::max(1.0, m.norm())) tri = false;
        }
        expect(r, tri, "triangularizing basis leaves lower residue");
    }

    const int R = ctx.quick ? 10 : 100;
    Rng sub_rng(child_seed(s, "subspaces"));
    for (int t = 0; t < R; ++t) {
        int d = 1 + t % 6;
        std::vector<CVec> combos;
        for (int i = 0; i < d; ++i) {
            CMat m = CMat::Zero(n, n);
            CMat c = random_gaussian(sub_rng, 6, 1);
            for (int b = 0; b < 6; ++b) m += c(b, 0) * upper.basis[static_cast<std::size_t>(b)];
            combos.push_back(vec(m));
        }
        CMat on = orthonormal_span(combos, ctx.tol);
        MatSpace sp{n, {}};
        for (Eigen::Index c = 0; c < on.cols(); ++c) sp.basis.push_back(unvec(on.col(c), n, n));
        GerstenhaberReport sg = gerstenhaber_check(sp, ctx.tol);
        expect(r, sg.is_nilpotent && sg.dim <= sg.bound,
               "random subspace violates the bound (trial " + std::to_string(t) + ")");
    }

    MatSpace broken = upper;
    CMat e11 = CMat::Zero(n, n);
    e11(0, 0) = 1.0;
    broken.basis.push_back(e11);
    expect(r, !is_nilpotent_space(broken, ctx.tol), "adding e11 kept the space nilpotent");
    return r;
}

// 6: planted generic length is recovered, against an independent
// Gram-elimination oracle over the rank-one tensors.
SuiteResult suite_length(Ctx& ctx) {
    SuiteResult r{6, "length computation", false, 0, 0, 0.0, ""};
    const int N = ctx.quick ? 12 : 100;
    const int n = 4;
    std::uint64_t s = child_seed(ctx.seed, "suite6");
    for (int i = 0; i < N; ++i) {
        std::uint64_t cs = child_seed(s, static_cast<std::uint64_t>(i));
        int planted = 1 + i % 6;
        Rng rng(cs);
        ElOp op{n, {}};
        for (int t = 0; t < planted; ++t)
            op.terms.emplace_back(random_gaussian(rng, n, n), random_gaussian(rng, n, n));
        // scramble the representation; the operator and its length persist
        op = recombine(op, random_invertible(rng, planted), ctx.tol);
        if (i % 2 == 0) {
            auto [a, b] = op.terms.back();
            op.terms.back() = {a, CMat(0.5 * b)};
            op.terms.emplace_back(a, CMat(0.5 * b));
        }
        expect(r, length(op, ctx.tol) == planted,
               "length != planted " + std::to_string(planted) + " (op " + std::to_string(i) + ")");
        expect(r, gram_rank(op) == planted,
               "Gram oracle disagrees with planted rank (op " + std::to_string(i) + ")");
    }
    return r;
}

// 7: length-3 classification round trip over all three bounded forms, and
// verified blowup witnesses for non-central length-3 operators.
SuiteResult suite_roundtrip(Ctx& ctx) {
    SuiteResult r{7, "length-3 round trip", false, 0, 0, 0.0, ""};
    const int N = ctx.quick ? 6 : 50;
    std::uint64_t s = child_seed(ctx.seed, "suite7");
    for (int i = 0; i < N; ++i) {
        std::uint64_t cs = child_seed(s, static_cast<std::uint64_t>(i));
        int n = 4 + i % 2;
        classify_into_pool(ctx, r, gen_triangular(n, 3, child_seed(cs, "i")).op, "i",
                           child_seed(cs, "ci"));
        classify_into_pool(ctx, r, gen_form2(n, child_seed(cs, "ii")).op, "ii",
                           child_seed(cs, "cii"));
        classify_into_pool(ctx, r, gen_form3(n, child_seed(cs, "iii")).op, "iii",
                           child_seed(cs, "ciii"));
        ElOp bad = gen_unbounded(n, 3, child_seed(cs, "bad"));
        Verdict v = classify(bad, ctx.tol, 10000, child_seed(cs, "cbad"));
        expect(r, v.status == Status::UNBOUNDED,
               "expected UNBOUNDED, got " + std::string(to_string(v.status)) + " (op " +
                   std::to_string(i) + ")");
        expect(r,
               v.certificate && v.certificate->witness &&
                   verify_witness(bad, *v.certificate->witness, ctx.tol),
               "unbounded verdict lacks a verified witness (op " + std::to_string(i) + ")");
    }
    return r;
}

// 8: zero-grid length-3 operators are spectrally infinitesimal in every
// sampled sense: central-zero trace vector, vanishing probe, (Sx)^5 = 0.
SuiteResult suite_infinitesimal(Ctx& ctx) {
    SuiteResult r{8, "infinitesimal consequences", false, 0, 0, 0.0, ""};
    const int N = ctx.quick ? 4 : 20;
    const int probes = ctx.quick ? 10 : 100;
    std::uint64_t s = child_seed(ctx.seed, "suite8");
    for (int i = 0; i < N; ++i) {
        std::uint64_t cs = child_seed(s, static_cast<std::uint64_t>(i));
        ElOp op = gen_zero_grid(4, 3, cs);
        double sc = op_scale(op);
        expect(r, trace_vector(op).norm() <= 1e-9 * sc,
               "trace vector not zero (op " + std::to_string(i) + ")");
        expect(r, infinitesimal_probe(op, ctx.quick ? 16 : 64, child_seed(cs, "probe"), ctx.tol),
               "infinitesimal probe failed (op " + std::to_string(i) + ")");
        Rng rng(child_seed(cs, "pow"));
        bool pow_ok = true;
        for (int p = 0; p < probes; ++p) {
            CMat x = random_gaussian(rng, 4, 4);
            CMat sx = specbound::apply(op, x);
            CMat s5 = sx * sx * sx * sx * sx;
            if (s5.norm() > 1e-8 * std::max(1.0, std::pow(sc * x.norm(), 5.0))) pow_ok = false;
        }
        expect(r, pow_ok, "(Sx)^5 != 0 (op " + std::to_string(i) + ")");
    }
    return r;
}

// 9: every BOUNDED verdict collected above survives the nilpotency
// dichotomy probe with zero red flags.
SuiteResult suite_dichotomy(Ctx& ctx) {
    SuiteResult r{9, "dichotomy probe soundness", false, 0, 0, 0.0, ""};
    const std::size_t cap = ctx.quick ? 12 : 60;
    const int samples = ctx.quick ? 10 : 50;
    std::uint64_t s = child_seed(ctx.seed, "suite9");
    std::size_t total = std::min(cap, ctx.bounded_pool.size());
    expect(r, total > 0, "no BOUNDED verdicts collected by earlier suites");
    for (std::size_t i = 0; i < total; ++i) {
        DichotomyReport rep = nilpotency_dichotomy_probe(
            ctx.bounded_pool[i], samples, child_seed(s, static_cast<std::uint64_t>(i)), ctx.tol);
        expect(r, rep.red_flags == 0,
               std::to_string(rep.red_flags) + " red flags on pooled op " + std::to_string(i));
    }
    return r;
}

}  // namespace

std::vector<SuiteResult> run_acceptance(bool quick, std::uint64_t seed, const Tolerance& tol) {
    Ctx ctx;
    ctx.quick = quick;
    ctx.seed = seed;
    ctx.tol = tol;
    std::vector<std::function<SuiteResult(Ctx&)>> suites = {
        suite_bound,  suite_trace_central, suite_length2,       suite_grid_identity,
        suite_gerstenhaber, suite_length,  suite_roundtrip,     suite_infinitesimal,
        suite_dichotomy};
    std::vector<SuiteResult> out;
    for (auto& suite : suites) {
        auto t0 = std::chrono::steady_clock::now();
        SuiteResult r;
        try {
            r = suite(ctx);
        } catch (const std::exception& e) {
            r.index = static_cast<int>(out.size()) + 1;
            r.name = "suite " + std::to_string(r.index);
            fail(r, std::string("exception: ") + e.what());
            ++r.checked;
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.pass = r.failed == 0;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace specbound
