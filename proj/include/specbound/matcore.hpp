#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace specbound {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Numerical cutoffs turning exact statements ("= 0", "in C*I") into
/// toleranced predicates.
struct Tolerance {
    double rank_rel = 1e-10;   // relative singular-value cutoff
    double scalar_rel = 1e-8;  // relative deviation for C*I membership
    double spec_abs = 1e-8;    // absolute eigenvalue cutoff, scaled by (1+|m|_F)

    void validate() const;
};

struct MatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- seeded randomness -------------------------------------------------

/// Derive a child seed from a parent seed and a label (splitmix64-style mix).
std::uint64_t child_seed(std::uint64_t seed, const std::string& label);
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

using Rng = std::mt19937_64;

CMat random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);
CVec random_gaussian_vec(Rng& rng, Eigen::Index n);
CMat random_unitary(Rng& rng, Eigen::Index n);
CMat random_invertible(Rng& rng, Eigen::Index n);

// --- basic predicates and spectral quantities --------------------------

bool is_finite(const CMat& m);

/// max |lambda| over eigenvalues of a square matrix.
double spectral_radius(const CMat& m);

/// All eigenvalues of a square matrix.
CVec eigenvalues(const CMat& m);

/// Count of singular values above rank_rel * sigma_max * max(rows, cols).
int numeric_rank(const CMat& m, const Tolerance& tol = {});

/// True when some power (m/|m|_F)^p, p <= rows, has Frobenius norm below
/// cutoff. Dense eigensolvers report spurious eigenvalues of size
/// ~eps^(1/n) on matrices whose exact power vanishes; this detects that
/// case directly from the powers.
bool numerically_nilpotent(const CMat& m, double cutoff = 1e-10);

/// trace(m)/n if m is within scalar_rel of a scalar multiple of I, else empty.
std::optional<Complex> scalar_of_identity(const CMat& m, const Tolerance& tol = {});

// --- vectorization (column-major throughout) ---------------------------

CVec vec(const CMat& m);
CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols);
CMat kron(const CMat& a, const CMat& b);

/// Rank of the span of a list of vectors.
int rank_of(const std::vector<CVec>& vecs, const Tolerance& tol = {});

/// Orthonormal basis of the span of a list of vectors (columns of result).
CMat orthonormal_span(const std::vector<CVec>& vecs, const Tolerance& tol = {});

/// Orthonormal basis of the null space of m (columns of result; may be 0 cols).
CMat null_space(const CMat& m, const Tolerance& tol = {});

// --- Sinclair-style prescription ---------------------------------------

/// Returns x with x*zeta_i = eta_i for every constraint (zeta_i, eta_i).
/// The zeta_i must be linearly independent. With require_invertible the
/// prescription is completed to a bijection by mapping a complement of
/// span{zeta_i} onto a random complement of span{eta_i}; this needs the
/// eta_i to be independent as well.
CMat prescribe(const std::vector<std::pair<CVec, CVec>>& constraints, int n,
               bool require_invertible, std::uint64_t seed = 0,
               const Tolerance& tol = {});

/// Matrix of y restricted to span(basis), expressed in that basis.
/// Errors if the span is not y-invariant within tolerance.
CMat matrix_in_basis(const CMat& y, const std::vector<CVec>& basis,
                     const Tolerance& tol = {});

}  // namespace specbound
