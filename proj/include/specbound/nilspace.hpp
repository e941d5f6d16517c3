#pragma once

#include "specbound/matcore.hpp"

#include <vector>

namespace specbound {

/// A linear subspace of M_n(C) given by an independent basis.
struct MatSpace {
    int ambient_dim = 0;
    std::vector<CMat> basis;
};

/// True iff every element of the span is nilpotent. Decided exactly by the
/// vanishing of all symmetrized trace words of degree 1..n in the basis
/// (polarization of tr(x^k) = 0), with a randomized spot-check on top.
bool is_nilpotent_space(const MatSpace& sp, const Tolerance& tol = {});

struct GerstenhaberReport {
    bool is_nilpotent = false;
    int dim = 0;
    int bound = 0;  // n(n-1)/2
    bool saturated = false;
};

GerstenhaberReport gerstenhaber_check(const MatSpace& sp, const Tolerance& tol = {});

/// A basis {w_1,...,w_n} of C^n in which every basis matrix is strictly
/// upper triangular, built by iterating the common-kernel construction.
/// Empty when the space is nilpotent but the kernel chain breaks.
std::optional<std::vector<CVec>> triangularize(const MatSpace& sp, const Tolerance& tol = {});

}  // namespace specbound
