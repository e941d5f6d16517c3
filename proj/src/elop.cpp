#include "specbound/elop.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>

namespace specbound {

void ElOp::validate() const {
    if (dim <= 0) throw MatError("ElOp: dim must be positive");
    for (const auto& [a, b] : terms) {
        if (a.rows() != dim || a.cols() != dim || b.rows() != dim || b.cols() != dim)
            throw MatError("ElOp: coefficient matrix is not dim x dim");
        if (!is_finite(a) || !is_finite(b))
            throw MatError("ElOp: non-finite coefficient entries");
    }
}

CMat apply(const ElOp& s, const CMat& x) {
    if (x.rows() != s.dim || x.cols() != s.dim)
        throw MatError("apply: input is not dim x dim");
    CMat out = CMat::Zero(s.dim, s.dim);
    for (const auto& [a, b] : s.terms) out += a * x * b;
    return out;
}

CMat superoperator_matrix(const ElOp& s) {
    const auto n2 = static_cast<Eigen::Index>(s.dim) * s.dim;
    CMat m = CMat::Zero(n2, n2);
    for (const auto& [a, b] : s.terms) m += kron(b.transpose(), a);
    return m;
}

CMat realignment(const ElOp& s) {
    const auto n2 = static_cast<Eigen::Index>(s.dim) * s.dim;
    CMat r = CMat::Zero(n2, n2);
    for (const auto& [a, b] : s.terms) r += vec(a) * vec(b).transpose();
    return r;
}

int length(const ElOp& s, const Tolerance& tol) {
    if (s.terms.empty()) return 0;
    return numeric_rank(realignment(s), tol);
}

ElOp minimal_rep(const ElOp& s, const Tolerance& tol) {
    const int n = s.dim;
    CMat r = realignment(s);
    if (r.norm() == 0.0) return ElOp{n, {}};
    Eigen::JacobiSVD<CMat> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double cutoff = tol.rank_rel * sv(0) * static_cast<double>(r.rows());
    ElOp out{n, {}};
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) <= cutoff) break;
        CVec va = svd.matrixU().col(k) * sv(k);
        CVec vb = svd.matrixV().col(k).conjugate();
        out.terms.emplace_back(unvec(va, n, n), unvec(vb, n, n));
    }
    return out;
}

ElOp star(const ElOp& s) {
    ElOp out{s.dim, {}};
    for (const auto& [a, b] : s.terms) out.terms.emplace_back(b, a);
    return out;
}

ElOp compose(const ElOp& s, const ElOp& t) {
    if (s.dim != t.dim) throw MatError("compose: ambient dimension mismatch");
    ElOp out{s.dim, {}};
    for (const auto& [sa, sb] : s.terms)
        for (const auto& [ta, tb] : t.terms) out.terms.emplace_back(sa * ta, tb * sb);
    return out;
}

CMat trace_vector(const ElOp& s) {
    CMat out = CMat::Zero(s.dim, s.dim);
    for (const auto& [a, b] : s.terms) out += b * a;
    return out;
}

static OpSpace make_opspace(int n, const std::vector<CMat>& gens, const Tolerance& tol) {
    OpSpace sp;
    sp.ambient_dim = n;
    std::vector<CVec> vs;
    vs.reserve(gens.size());
    for (const auto& g : gens) vs.push_back(vec(g));
    CMat q = orthonormal_span(vs, tol);
    for (Eigen::Index j = 0; j < q.cols(); ++j) sp.basis.push_back(unvec(q.col(j), n, n));
    sp.dim = static_cast<int>(sp.basis.size());
    return sp;
}

static int local_dim_at(const OpSpace& sp, const CVec& zeta, const Tolerance& tol) {
    std::vector<CVec> imgs;
    imgs.reserve(sp.basis.size());
    for (const auto& m : sp.basis) imgs.push_back(m * zeta);
    return rank_of(imgs, tol);
}

ElOpSpaces spaces(const ElOp& s, const Tolerance& tol, int trials, std::uint64_t seed) {
    const int n = s.dim;
    std::vector<CMat> la, rb, v, vp;
    for (const auto& [a, b] : s.terms) {
        la.push_back(a);
        rb.push_back(b);
    }
    for (const auto& [ai, bi] : s.terms)
        for (const auto& [aj, bj] : s.terms) v.push_back(bi * aj);
    vp = v;
    vp.push_back(CMat::Identity(n, n));

    ElOpSpaces out;
    out.L = make_opspace(n, la, tol);
    out.R = make_opspace(n, rb, tol);
    out.V = make_opspace(n, v, tol);
    out.Vp = make_opspace(n, vp, tol);

    OpSpace* all[4] = {&out.L, &out.R, &out.V, &out.Vp};
    Rng rng(child_seed(seed, "spaces"));
    std::vector<CVec> samples;
    for (int t = 0; t < trials; ++t) samples.push_back(random_gaussian_vec(rng, n));
    std::vector<std::array<int, 4>> dims(samples.size());
    int best[4] = {0, 0, 0, 0};
    for (std::size_t t = 0; t < samples.size(); ++t) {
        for (int j = 0; j < 4; ++j) {
            dims[t][j] = local_dim_at(*all[j], samples[t], tol);
            best[j] = std::max(best[j], dims[t][j]);
        }
    }
    for (int j = 0; j < 4; ++j) all[j]->local_dim = best[j];
    // a generic sample attains all four maxima simultaneously
    for (std::size_t t = 0; t < samples.size(); ++t) {
        if (dims[t][0] == best[0] && dims[t][1] == best[1] && dims[t][2] == best[2] &&
            dims[t][3] == best[3]) {
            for (int j = 0; j < 4; ++j) all[j]->separating_vector = samples[t];
            break;
        }
    }
    return out;
}

ElOp recombine(const ElOp& s, const CMat& c, const Tolerance& tol) {
    const auto k = static_cast<Eigen::Index>(s.terms.size());
    if (c.rows() != k || c.cols() != k) throw MatError("recombine: C must be k x k");
    if (numeric_rank(c, tol) != k) throw MatError("recombine: C is singular");
    CMat cinvT = c.inverse().transpose();
    ElOp out{s.dim, {}};
    for (Eigen::Index j = 0; j < k; ++j) {
        CMat u = CMat::Zero(s.dim, s.dim), v = CMat::Zero(s.dim, s.dim);
        for (Eigen::Index q = 0; q < k; ++q) {
            u += c(j, q) * s.terms[q].first;
            v += cinvT(j, q) * s.terms[q].second;
        }
        out.terms.emplace_back(std::move(u), std::move(v));
    }
    return out;
}

ProductGrid product_grid(const ElOp& s) {
    const auto k = static_cast<int>(s.terms.size());
    ProductGrid g;
    g.n_terms = k;
    g.ambient_dim = s.dim;
    g.entries.resize(k);
    for (int i = 0; i < k; ++i) {
        g.entries[i].resize(k);
        for (int j = 0; j < k; ++j) g.entries[i][j] = s.terms[i].second * s.terms[j].first;
    }
    return g;
}

std::optional<std::pair<std::vector<CMat>, std::vector<CMat>>> grid_realizable(
    const ProductGrid& g, const Tolerance& tol) {
    const int k = g.n_terms;
    const int n = g.ambient_dim;
    if (k == 0) return std::make_pair(std::vector<CMat>{}, std::vector<CMat>{});
    CMat block(k * n, k * n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) block.block(i * n, j * n, n, n) = g.at(i, j);
    if (numeric_rank(block, tol) > n) return std::nullopt;
    Eigen::JacobiSVD<CMat> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? tol.rank_rel * sv(0) * static_cast<double>(block.rows()) : 0.0;
    CMat vstack = CMat::Zero(k * n, n), ustack = CMat::Zero(n, k * n);
    for (Eigen::Index r = 0; r < sv.size() && r < n; ++r) {
        if (sv(r) <= cutoff) break;
        double root = std::sqrt(sv(r));
        vstack.col(r) = svd.matrixU().col(r) * root;
        ustack.row(r) = svd.matrixV().col(r).adjoint() * root;
    }
    std::vector<CMat> us(k), vs(k);
    for (int i = 0; i < k; ++i) {
        vs[i] = vstack.block(i * n, 0, n, n);
        us[i] = ustack.block(0, i * n, n, n);
    }
    // verify the factorization reproduces the grid
    double scale = std::max(1.0, block.norm());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if ((vs[i] * us[j] - g.at(i, j)).norm() > 1e-8 * scale) return std::nullopt;
    return std::make_pair(us, vs);
}

double probe_distance(const ElOp& s, const ElOp& t, int probes, std::uint64_t seed) {
    if (s.dim != t.dim) throw MatError("probe_distance: dimension mismatch");
    Rng rng(child_seed(seed, "probe_distance"));
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        CMat x = random_gaussian(rng, s.dim, s.dim);
        CMat d = specbound::apply(s, x) - specbound::apply(t, x);
        worst = std::max(worst, d.norm() / std::max(1.0, x.norm()));
    }
    return worst;
}

}  // namespace specbound
