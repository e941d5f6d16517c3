#pragma once

#include "specbound/matcore.hpp"

#include <utility>
#include <vector>

namespace specbound {

/// An elementary operator S(x) = sum_i a_i x b_i on M_n(C), stored as an
/// ordered list of coefficient pairs. The zero operator is the empty list.
struct ElOp {
    int dim = 0;
    std::vector<std::pair<CMat, CMat>> terms;

    void validate() const;
    static ElOp identity(int n) {
        return ElOp{n, {{CMat::Identity(n, n), CMat::Identity(n, n)}}};
    }
};

/// A finite-dimensional space of matrices with an orthonormal basis
/// (Frobenius inner product), its dimension, local dimension and, when
/// found by sampling, a vector attaining the local dimension.
struct OpSpace {
    int ambient_dim = 0;
    std::vector<CMat> basis;
    int dim = 0;
    int local_dim = 0;
    std::optional<CVec> separating_vector;
};

struct ElOpSpaces {
    OpSpace L;   // span of left coefficients
    OpSpace R;   // span of right coefficients
    OpSpace V;   // span of products b_i a_j
    OpSpace Vp;  // V + C*I
};

/// The n_terms x n_terms grid of products; entry (i,j) = b_i a_j for a
/// representation S = sum_j M_{a_j, b_j}.
struct ProductGrid {
    int n_terms = 0;
    int ambient_dim = 0;
    std::vector<std::vector<CMat>> entries;

    const CMat& at(int i, int j) const { return entries.at(i).at(j); }
};

CMat apply(const ElOp& s, const CMat& x);

/// n^2 x n^2 matrix M with M*vec(x) = vec(apply(s,x)); column-major vec,
/// so a single term (a,b) contributes b^T (x) a (Kronecker product).
CMat superoperator_matrix(const ElOp& s);

/// Realignment matrix sum_i vec(a_i) vec(b_i)^T; its rank equals the length.
CMat realignment(const ElOp& s);

int length(const ElOp& s, const Tolerance& tol = {});

/// Representation with exactly length(s) terms and independent coefficient
/// families, from the truncated SVD of the realignment matrix.
ElOp minimal_rep(const ElOp& s, const Tolerance& tol = {});

/// Term-wise swap (a_i, b_i) -> (b_i, a_i).
ElOp star(const ElOp& s);

/// apply(compose(s,t), x) = apply(s, apply(t,x)).
ElOp compose(const ElOp& s, const ElOp& t);

/// sum_i b_i a_i.
CMat trace_vector(const ElOp& s);

ElOpSpaces spaces(const ElOp& s, const Tolerance& tol = {}, int trials = 32,
                  std::uint64_t seed = 0);

/// New representation u_j = sum_k C_{jk} a_k, v_j = sum_k (C^-T)_{jk} b_k;
/// the operator is unchanged as a map.
ElOp recombine(const ElOp& s, const CMat& c, const Tolerance& tol = {});

ProductGrid product_grid(const ElOp& s);

/// Decide whether G(i,j) = v_i u_j for matrices u_j, v_i of the ambient
/// size; realizable iff the stacked block matrix has rank <= ambient_dim.
std::optional<std::pair<std::vector<CMat>, std::vector<CMat>>> grid_realizable(
    const ProductGrid& g, const Tolerance& tol = {});

/// Max relative deviation of apply(s,.) and apply(t,.) over seeded probes.
double probe_distance(const ElOp& s, const ElOp& t, int probes = 20,
                      std::uint64_t seed = 0);

}  // namespace specbound
