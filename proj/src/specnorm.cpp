#include "specbound/specnorm.hpp"

#include <algorithm>
#include <cmath>

namespace specbound {

std::optional<double> ratio(const ElOp& s, const CMat& x, const Tolerance& tol) {
    if (x.rows() != s.dim || x.cols() != s.dim)
        throw MatError("ratio: input is not dim x dim");
    double rx = spectral_radius(x);
    if (rx <= tol.spec_abs * (1.0 + x.norm())) return std::nullopt;
    CMat sx = specbound::apply(s, x);
    // exact-nilpotent images would otherwise contribute eigensolver noise
    if (numerically_nilpotent(sx)) return 0.0;
    return spectral_radius(sx) / rx;
}

bool verify_witness(const ElOp& s, const BlowupWitness& w, const Tolerance& tol) {
    if (w.xs.empty() || w.xs.size() != w.ratios.size()) return false;
    double prev = -1.0;
    for (std::size_t i = 0; i < w.xs.size(); ++i) {
        auto r = ratio(s, w.xs[i], tol);
        if (!r) return false;
        if (std::abs(*r - w.ratios[i]) > 1e-6 * std::max(1.0, std::abs(w.ratios[i])))
            return false;
        if (w.ratios[i] <= prev) return false;
        prev = w.ratios[i];
    }
    return w.ratios.back() >= w.threshold;
}

namespace {

// Track the sequence of record ratios; the surviving increasing chain is
// what goes into the witness.
struct RecordChain {
    std::vector<CMat> xs;
    std::vector<double> ratios;

    void offer(const CMat& x, double r) {
        if (!ratios.empty() && r <= ratios.back()) return;
        xs.push_back(x);
        ratios.push_back(r);
        if (ratios.size() > 24) {  // keep the tail
            xs.erase(xs.begin());
            ratios.erase(ratios.begin());
        }
    }
    double best() const { return ratios.empty() ? 0.0 : ratios.back(); }
};

std::optional<BlowupWitness> finish(const ElOp& s, const RecordChain& chain,
                                    double threshold, const std::string& construction,
                                    std::uint64_t seed, const Tolerance& tol) {
    if (chain.best() < threshold) return std::nullopt;
    BlowupWitness w;
    w.xs = chain.xs;
    w.ratios = chain.ratios;
    w.threshold = threshold;
    w.construction = construction;
    w.seed = seed;
    if (!verify_witness(s, w, tol)) return std::nullopt;
    return w;
}

// Greedily extend `set` (columns) by v when it increases the rank.
bool try_extend(std::vector<CVec>& set, const CVec& v, const Tolerance& tol) {
    std::vector<CVec> trial = set;
    trial.push_back(v);
    if (rank_of(trial, tol) == static_cast<int>(trial.size())) {
        set = std::move(trial);
        return true;
    }
    return false;
}

struct Budget {
    int limit;
    int used = 0;
    bool spent() const { return used >= limit; }
};

// One deterministic orbit attempt for a fixed (zeta, pivot). Walks the
// geometric k-schedule and offers candidates z = x_k y x_k^{-1} (plus a
// shifted variant when z is quasi-nilpotent).
std::optional<BlowupWitness> orbit_family(const ElOp& s, const CVec& zeta,
                                          const std::vector<CVec>& frame, int pivot,
                                          double threshold, Budget& budget,
                                          std::uint64_t seed, const Tolerance& tol) {
    const int n = s.dim;
    const CVec& w = frame[static_cast<std::size_t>(pivot)];
    CMat eye = CMat::Identity(n, n);

    std::vector<std::pair<CVec, CVec>> ycons;
    ycons.emplace_back(zeta, w);
    for (std::size_t t = 1; t < frame.size(); ++t)
        ycons.emplace_back(frame[t], CVec::Zero(n));
    CMat y;
    try {
        y = prescribe(ycons, n, /*require_invertible=*/false, seed, tol);
    } catch (const MatError&) {
        return std::nullopt;
    }

    RecordChain chain, chain_shift;
    for (int e = 1; e <= 16 && !budget.spent(); ++e) {
        double k = std::ldexp(1.0, e);  // 2, 4, ..., 2^16
        std::vector<std::pair<CVec, CVec>> xcons;
        xcons.emplace_back(zeta, (1.0 / k) * w);
        xcons.emplace_back(w, zeta);
        for (std::size_t t = 1; t < frame.size(); ++t) {
            if (static_cast<int>(t) == pivot) continue;
            xcons.emplace_back(frame[t], frame[t]);
        }
        CMat xk;
        try {
            xk = prescribe(xcons, n, /*require_invertible=*/true, child_seed(seed, e), tol);
        } catch (const MatError&) {
            continue;
        }
        CMat z = xk * y * xk.inverse();
        ++budget.used;
        if (auto r = ratio(s, z, tol)) {
            chain.offer(z, *r);
            if (chain.best() >= threshold)
                if (auto wit = finish(s, chain, threshold, "orbit", seed, tol)) return wit;
        } else {
            // y similar-to-z is quasi-nilpotent; shift spectrum off zero
            CMat zs = z + eye;
            ++budget.used;
            if (auto r2 = ratio(s, zs, tol)) {
                chain_shift.offer(zs, *r2);
                if (chain_shift.best() >= threshold)
                    if (auto wit = finish(s, chain_shift, threshold, "orbit", seed, tol))
                        return wit;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<BlowupWitness> search_blowup(const ElOp& s, double threshold, int budget_limit,
                                           std::uint64_t seed, const Tolerance& tol) {
    if (!(threshold > 0)) throw MatError("search_blowup: threshold must be positive");
    const int n = s.dim;
    Budget budget{budget_limit};
    ElOp sm = minimal_rep(s, tol);
    if (sm.terms.empty()) return std::nullopt;

    // -- phase 1: deterministic orbit family ------------------------------
    auto sp = spaces(sm, tol, 32, child_seed(seed, "blowup_spaces"));
    std::vector<CVec> zetas;
    if (sp.Vp.separating_vector) zetas.push_back(*sp.Vp.separating_vector);
    {
        Rng rng(child_seed(seed, "blowup_zeta"));
        for (int t = 0; t < 4; ++t) zetas.push_back(random_gaussian_vec(rng, n));
    }
    const auto k_terms = sm.terms.size();
    for (const auto& zeta : zetas) {
        if (budget.spent()) break;
        // frame: zeta followed by independent grid images, diagonal entries first
        std::vector<CVec> frame{zeta};
        std::vector<int> pivots;
        auto add_image = [&](const CMat& g, bool pivot_candidate) {
            CVec img = g * zeta;
            if (img.norm() <= 1e-10 * std::max(1.0, g.norm() * zeta.norm())) return;
            if (try_extend(frame, img, tol) && pivot_candidate)
                pivots.push_back(static_cast<int>(frame.size()) - 1);
        };
        for (std::size_t i = 0; i < k_terms; ++i)
            add_image(sm.terms[i].second * sm.terms[i].first, true);
        for (std::size_t i = 0; i < k_terms; ++i)
            for (std::size_t j = 0; j < k_terms; ++j) {
                if (i == j) continue;
                add_image(sm.terms[i].second * sm.terms[j].first, true);
            }
        for (int pivot : pivots) {
            if (budget.spent()) break;
            if (auto w = orbit_family(s, zeta, frame, pivot, threshold, budget,
                                      child_seed(seed, "orbit"), tol))
                return w;
        }
    }

    // -- phase 2: random candidates with similarity amplification ---------
    RecordChain chain;
    CMat best_x;
    double best_r = -1.0;
    Rng rng(child_seed(seed, "blowup_random"));
    int phase2 = std::max(16, (budget.limit - budget.used) * 3 / 4);
    for (int t = 0; t < phase2 && !budget.spent(); ++t) {
        CMat cand;
        if (best_r < 0 || t % 3 == 0) {
            cand = random_gaussian(rng, n, n);
        } else {
            CMat g = CMat::Identity(n, n) + 0.7 * random_gaussian(rng, n, n);
            Eigen::FullPivLU<CMat> lu(g);
            if (!lu.isInvertible()) continue;
            cand = g * best_x * lu.inverse();
        }
        ++budget.used;
        auto r = ratio(s, cand, tol);
        if (!r) continue;
        if (*r > best_r) {
            best_r = *r;
            best_x = cand;
            chain.offer(cand, *r);
            if (chain.best() >= threshold)
                if (auto w = finish(s, chain, threshold, "random", seed, tol)) return w;
        }
    }

    // -- phase 3: entrywise hill climb on the best candidate --------------
    if (best_r > 0) {
        std::normal_distribution<double> dist(0.0, 1.0);
        while (!budget.spent()) {
            CMat cand = best_x;
            int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
            int j = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
            cand(i, j) *= Complex(1.0 + 0.5 * dist(rng), 0.25 * dist(rng));
            ++budget.used;
            auto r = ratio(s, cand, tol);
            if (r && *r > best_r) {
                best_r = *r;
                best_x = cand;
                chain.offer(cand, *r);
                if (chain.best() >= threshold)
                    if (auto w = finish(s, chain, threshold, "hillclimb", seed, tol)) return w;
            }
        }
    }
    return std::nullopt;
}

NormEstimate estimate_spectral_norm(const ElOp& s, int budget, std::uint64_t seed,
                                    const Tolerance& tol) {
    if (budget < 1) throw MatError("estimate_spectral_norm: budget must be >= 1");
    const int n = s.dim;
    NormEstimate best;
    best.argmax = CMat::Identity(n, n);
    if (auto r0 = ratio(s, best.argmax, tol)) best.lower_bound = *r0;

    std::normal_distribution<double> dist(0.0, 1.0);
    for (int t = 0; t < budget; ++t) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(t)));
        CMat cand;
        switch (t % 3) {
            case 0:
                cand = random_gaussian(rng, n, n);
                break;
            case 1: {
                CMat g = CMat::Identity(n, n) + 0.7 * random_gaussian(rng, n, n);
                Eigen::FullPivLU<CMat> lu(g);
                if (!lu.isInvertible()) continue;
                cand = g * best.argmax * lu.inverse();
                break;
            }
            default: {
                cand = best.argmax;
                int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
                int j = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
                cand(i, j) *= Complex(1.0 + 0.5 * dist(rng), 0.25 * dist(rng));
                break;
            }
        }
        auto r = ratio(s, cand, tol);
        if (r && *r > best.lower_bound) {
            best.lower_bound = *r;
            best.argmax = cand;
        }
    }
    return best;
}

bool infinitesimal_probe(const ElOp& s, int samples, std::uint64_t seed,
                         const Tolerance& tol) {
    Rng rng(child_seed(seed, "infinitesimal"));
    for (int t = 0; t < samples; ++t) {
        CMat x = random_gaussian(rng, s.dim, s.dim);
        CMat sx = specbound::apply(s, x);
        if (numerically_nilpotent(sx)) continue;
        if (spectral_radius(sx) > tol.spec_abs * (1.0 + sx.norm())) return false;
    }
    return true;
}

}  // namespace specbound
