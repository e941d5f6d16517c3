#pragma once

#include "specbound/elop.hpp"

namespace specbound {

/// Operator with a triangular product grid: zero strictly lower blocks,
/// scalar diagonal. For k = 1 the scalar is drawn from [0, 3]; for k >= 2
/// every diagonal scalar is 0 (on M_n a nonzero scalar diagonal entry
/// forces invertible coefficients, which kills all other grid entries, so
/// only the all-zero diagonal is realizable). Built from a random flag:
/// range(u_j) inside W_j and ker(v_i) containing W_i.
struct TriangularGen {
    ElOp op;
    std::vector<Complex> lambdas;
};
TriangularGen gen_triangular(int n, int k, std::uint64_t seed);

/// Length-3 operator realizing the lambda = 0 rank-one grid
///   [0, Z1, 0; Z0, 0, Z1; 0, -Z0, 0]
/// with Z0 = zeta0 f^T, Z1 = zeta1 f^T (shared row f).
struct Form2Gen {
    ElOp op;
    CVec zeta0, zeta1, f;
};
Form2Gen gen_form2(int n, std::uint64_t seed);

/// Same pattern with Z0 = zeta0 f^T, Z1 = zeta0 g^T (shared column zeta0).
struct Form3Gen {
    ElOp op;
    CVec zeta0, f, g;
};
Form3Gen gen_form3(int n, std::uint64_t seed);

/// k independent Gaussian coefficient pairs; generic length k.
ElOp gen_random(int n, int k, std::uint64_t seed);

/// Length-2 operator M_{a,b} + M_{c,d} with ba = dc = bc = 0 and da
/// generically nonzero (the spectrally bounded length-2 normal form with
/// zero scalars); needs n >= 3.
ElOp gen_length2_good(int n, std::uint64_t seed);

/// Random operator with non-scalar trace vector (spectrally unbounded by
/// the trace-centrality necessary condition); resamples until non-scalar.
ElOp gen_unbounded(int n, int k, std::uint64_t seed);

/// k terms whose product grid vanishes identically: range(a_i) inside a
/// fixed subspace W annihilated by every b_j. All S(x) square to zero.
ElOp gen_zero_grid(int n, int k, std::uint64_t seed);

/// The 3x3 rank-one grid with general lambda on the diagonal. form 2
/// shares the row functional, form 3 the column vector. For lambda != 0
/// no operator on M_n realizes it; the grid-level algebra still holds.
ProductGrid make_form_grid(int form, int n, Complex lambda, std::uint64_t seed);

}  // namespace specbound
