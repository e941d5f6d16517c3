#pragma once

#include "specbound/elop.hpp"
#include "specbound/specnorm.hpp"

#include <string>

namespace specbound {

enum class Status { BOUNDED, UNBOUNDED, INFINITESIMAL, UNDECIDED };

const char* to_string(Status s);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Machine-checkable payload backing a BOUNDED or UNBOUNDED verdict.
/// form "i": rep + diagonal scalars; forms "ii"/"iii": rep + rank-one
/// parameters of the off-diagonal grid entries; "exceptional": the n = 2
/// rank-one-range case z -> lambda*Tr(z) corner.
struct Certificate {
    std::string form;
    std::optional<ElOp> rep;
    std::vector<Complex> lambdas;
    Complex lambda{0.0, 0.0};
    std::optional<CVec> zeta0, zeta1, f, g;
    std::optional<BlowupWitness> witness;
};

struct Verdict {
    Status status = Status::UNDECIDED;
    std::optional<Certificate> certificate;
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, int>> budgets;
    std::uint64_t seed = 0;
    std::string reason;
};

/// Necessary condition for spectral boundedness: sum b_i a_i scalar.
std::pair<bool, CMat> check_trace_central(const ElOp& s, const Tolerance& tol = {});

enum class HomVerdict { HOM, NOT_HOM };

struct HomResult {
    HomVerdict verdict = HomVerdict::NOT_HOM;
    std::optional<std::pair<CMat, CMat>> witness;  // x, y with uxyv != uxv*uyv
};

/// Is x -> uxv multiplicative? On M_n: yes iff vu is 0 or I, and in the
/// vu = 0 case the map itself must vanish.
HomResult check_mult_homomorphism(const CMat& u, const CMat& v, const Tolerance& tol = {});

struct TriangularRep {
    ElOp rep;
    std::vector<Complex> lambdas;
};

/// Recombination of minimal_rep(s) whose product grid has zero strictly
/// lower blocks and scalar diagonal. Exact deflation: candidate first
/// columns come from the generalized eigenproblem b_p u = lambda c_p I,
/// with backtracking over eigenvalue/null-vector choices.
std::optional<TriangularRep> find_triangular_rep(const ElOp& s, const Tolerance& tol = {},
                                                 int budget = 10000, std::uint64_t seed = 0);

Verdict classify_length1(const ElOp& s, const Tolerance& tol = {}, int budget = 10000,
                         std::uint64_t seed = 0);
Verdict classify_length2(const ElOp& s, const Tolerance& tol = {}, int budget = 10000,
                         std::uint64_t seed = 0);
Verdict classify_length3(const ElOp& s, const Tolerance& tol = {}, int budget = 10000,
                         std::uint64_t seed = 0);

/// Dispatch on length; lengths >= 4 get necessary checks and the blowup
/// search only.
Verdict classify(const ElOp& s, const Tolerance& tol = {}, int budget = 10000,
                 std::uint64_t seed = 0);

/// S*S depends only on the grid: S*(Sx) = sum_{i,j} G(i,j) x G(j,i).
ElOp grid_star_product(const ProductGrid& g);

struct ConsequenceReport {
    std::vector<CheckResult> checks;
    bool all_pass = true;
};

/// Sampled corollary checks appropriate to the verdict: length-2 BOUNDED
/// implies S*S scalar (or scalar times trace when n = 2) and commutator
/// [S*Sx, x] = 0; on n >= 3 additionally (Sx)^3 = 0 and S*S = 0; length-3
/// INFINITESIMAL implies (Sx)^5 = 0 and S*S = 0.
ConsequenceReport consequence_suite(const ElOp& s, const Verdict& v, int samples,
                                    std::uint64_t seed, const Tolerance& tol = {});

struct DichotomyReport {
    int samples = 0;
    int red_flags = 0;
    std::vector<CheckResult> checks;
};

/// For sampled zeta, build x with x(V_S zeta) in C*zeta and x zeta = 0,
/// then test that S(x) restricted to L_S zeta is nilpotent. Required for
/// any spectrally bounded operator; each failure is a red flag.
DichotomyReport nilpotency_dichotomy_probe(const ElOp& s, int samples, std::uint64_t seed,
                                           const Tolerance& tol = {});

/// For operators whose whole product grid is scalar: recombine so the
/// scalar grid takes the block form [[T, 0], [*, 0]] with T triangular of
/// order rank(grid). Returns the rep and T.
std::optional<std::pair<ElOp, CMat>> normalize_scalar_V(const ElOp& s, const Tolerance& tol = {},
                                                        std::uint64_t seed = 0);

/// Re-verify a BOUNDED/UNBOUNDED certificate against s: the certified rep
/// must equal s as a map (probe distance <= 1e-9) and its grid must match
/// the claimed form entrywise (<= 1e-8 relative); witnesses re-verify.
bool verify_certificate(const ElOp& s, const Verdict& v, const Tolerance& tol = {});

}  // namespace specbound
