#pragma once

#include "specbound/elop.hpp"

#include <string>

namespace specbound {

/// A sequence of test matrices whose spectral ratios r(Sx)/r(x) grow past
/// the threshold, certifying failure of spectral boundedness.
struct BlowupWitness {
    std::vector<CMat> xs;
    std::vector<double> ratios;
    double threshold = 0.0;
    std::string construction;  // "orbit" | "random" | "hillclimb" | "deterministic_family"
    std::uint64_t seed = 0;
};

/// r(apply(S,x))/r(x); empty when x is numerically quasi-nilpotent.
std::optional<double> ratio(const ElOp& s, const CMat& x, const Tolerance& tol = {});

struct NormEstimate {
    double lower_bound = 0.0;
    CMat argmax;
};

/// Best spectral ratio found by seeded random sampling, similarity
/// conjugation of promising candidates and entrywise hill climbing.
/// A lower bound only; never an upper bound.
NormEstimate estimate_spectral_norm(const ElOp& s, int budget, std::uint64_t seed,
                                    const Tolerance& tol = {});

/// Searches for a blowup witness: (1) the deterministic similarity-orbit
/// family x_k y x_k^{-1} built from grid images of a separating vector,
/// (2) random similarity amplification, (3) entrywise hill climbing.
std::optional<BlowupWitness> search_blowup(const ElOp& s, double threshold, int budget,
                                           std::uint64_t seed, const Tolerance& tol = {});

/// Re-verify a witness: ratios strictly increasing, last one past the
/// threshold, each recomputable from its x within relative 1e-6.
bool verify_witness(const ElOp& s, const BlowupWitness& w, const Tolerance& tol = {});

/// Sampled necessary probe for spectral infinitesimality: r(Sx) ~ 0 on
/// `samples` seeded random inputs. Not a proof.
bool infinitesimal_probe(const ElOp& s, int samples, std::uint64_t seed,
                         const Tolerance& tol = {});

}  // namespace specbound
