#include "specbound/nilspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace specbound {

namespace {

struct WordAccumulator {
    // accumulated trace per multiset of basis indices, per degree
    std::map<std::vector<int>, Complex> sums;

    void visit(const std::vector<CMat>& basis, int depth_left, CMat prod,
               std::vector<int>& word) {
        if (depth_left == 0) {
            std::vector<int> key = word;
            std::sort(key.begin(), key.end());
            sums[key] += prod.trace();
            return;
        }
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
            word.push_back(i);
            visit(basis, depth_left - 1, prod * basis[i], word);
            word.pop_back();
        }
    }
};

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

// number of distinct arrangements of a sorted multiset
double arrangements(const std::vector<int>& key) {
    double denom = 1.0;
    int run = 1;
    for (std::size_t i = 1; i < key.size(); ++i) {
        if (key[i] == key[i - 1]) ++run;
        else { denom *= factorial(run); run = 1; }
    }
    denom *= factorial(run);
    return factorial(static_cast<int>(key.size())) / denom;
}

}  // namespace

bool is_nilpotent_space(const MatSpace& sp, const Tolerance& tol) {
    const int n = sp.ambient_dim;
    if (sp.basis.empty()) return true;
    std::vector<CVec> vs;
    for (const auto& b : sp.basis) {
        if (b.rows() != n || b.cols() != n) throw MatError("is_nilpotent_space: bad basis shape");
        vs.push_back(vec(b));
    }
    if (rank_of(vs, tol) != static_cast<int>(sp.basis.size()))
        throw MatError("is_nilpotent_space: basis is linearly dependent");

    // normalize to unit Frobenius norm so tolerances are scale-free
    std::vector<CMat> normed;
    for (const auto& b : sp.basis) {
        double nm = b.norm();
        if (nm == 0.0) continue;
        normed.push_back(b / nm);
    }

    for (int d = 1; d <= n; ++d) {
        WordAccumulator acc;
        std::vector<int> word;
        acc.visit(normed, d, CMat::Identity(n, n), word);
        for (const auto& [key, sum] : acc.sums) {
            double limit = tol.spec_abs * arrangements(key) * n;
            if (std::abs(sum) > limit) return false;
        }
    }

    // randomized spot-check on top of the exact word criterion
    Rng rng(child_seed(0, "nilpotent_spot"));
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int t = 0; t < 16; ++t) {
        CMat m = CMat::Zero(n, n);
        for (const auto& b : normed) m += Complex(dist(rng), dist(rng)) * b;
        double scale = std::max(1.0, m.norm());
        // eigensolvers report eigenvalues ~eps^(1/n)*|m| on roundoff-level
        // perturbations of nilpotent matrices; the power test is reliable
        if (!numerically_nilpotent(m, 1e-8) && spectral_radius(m) > 1e-6 * scale) return false;
    }
    return true;
}

GerstenhaberReport gerstenhaber_check(const MatSpace& sp, const Tolerance& tol) {
    GerstenhaberReport rep;
    rep.is_nilpotent = is_nilpotent_space(sp, tol);
    rep.dim = static_cast<int>(sp.basis.size());
    rep.bound = sp.ambient_dim * (sp.ambient_dim - 1) / 2;
    rep.saturated = rep.is_nilpotent && rep.dim == rep.bound;
    return rep;
}

std::optional<std::vector<CVec>> triangularize(const MatSpace& sp, const Tolerance& tol) {
    const int n = sp.ambient_dim;
    if (!is_nilpotent_space(sp, tol))
        throw MatError("triangularize: space is not nilpotent");
    double scale = 1.0;
    for (const auto& b : sp.basis) scale = std::max(scale, b.norm());

    // Build the flag front to back: at step j find w_j outside span(W) with
    // B w_j in span(W) for every basis matrix B.
    std::vector<CVec> flag;
    for (int j = 0; j < n; ++j) {
        CMat W(n, j);
        for (int t = 0; t < j; ++t) W.col(t) = flag[t];
        CMat proj = CMat::Identity(n, n);
        if (j > 0) {
            Eigen::HouseholderQR<CMat> qr(W);
            CMat q = qr.householderQ() * CMat::Identity(n, j);
            proj -= q * q.adjoint();
        }
        const auto k = static_cast<Eigen::Index>(sp.basis.size());
        CMat stacked(k * n, n);
        for (Eigen::Index t = 0; t < k; ++t)
            stacked.block(t * n, 0, n, n) = proj * (sp.basis[t] / scale);
        // absolute cutoff floor: near the top of the flag the stacked matrix is
        // roundoff-small and a purely relative rank cutoff would read full rank
        Eigen::JacobiSVD<CMat> svd(stacked, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        double cutoff = std::max(tol.rank_rel * sv(0) * static_cast<double>(stacked.rows()), 1e-10);
        int r = 0;
        for (Eigen::Index c = 0; c < sv.size(); ++c)
            if (sv(c) > cutoff) ++r;
        CMat ns = svd.matrixV().rightCols(n - r);
        // pick a null vector outside span(W)
        CVec chosen;
        bool found = false;
        for (Eigen::Index c = 0; c < ns.cols(); ++c) {
            CVec cand = proj * ns.col(c);
            if (cand.norm() > 1e-6) {
                chosen = cand / cand.norm();
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;  // nilpotent but no flag found
        flag.push_back(chosen);
    }

    // verify: conjugated basis strictly upper triangular
    CMat W(n, n);
    for (int t = 0; t < n; ++t) W.col(t) = flag[t];
    CMat winv = W.inverse();
    for (const auto& b : sp.basis) {
        CMat m = winv * b * W;
        double lower = 0.0;
        for (int i = 0; i < n; ++i)
            for (int jj = 0; jj <= i; ++jj) lower += std::norm(m(i, jj));
        if (std::sqrt(lower) > 1e-8 * scale) return std::nullopt;
    }
    return flag;
}

}  // namespace specbound
