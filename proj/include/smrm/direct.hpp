#pragma once

#include <cstddef>

#include "smrm/model.hpp"
#include "smrm/types.hpp"

namespace smrm {

/// Gauss reduction (no pivoting) over convolution equations. acal must come
/// from a preprocessed system, (I o delta) - A o G, which guarantees nonzero
/// pivots. Updated in place to upper-triangular form.
void gauss_reduce(Hypermatrix& acal, Hypervector& h);

/// Back substitution over an upper-triangular convolution system.
Hypervector back_substitute(const Hypermatrix& upper, const Hypervector& h);

/// Builds (I o delta) - A o G for a discrete system.
Hypermatrix build_acal(const ReachabilitySystem& system);

struct DirectOptions {
    bool residual_check = true;
    double residual_tol = 1e-6;
};

/// Gaussian elimination: reduction then back substitution. The report's
/// residual field holds ||f - ((A o G) (*) f + h)||_inf.
SolveReport solve_ge(const ReachabilitySystem& system, const DirectOptions& opts = {});

/// Per-frequency LU solves of (I - A o C_n(tau)) x(tau) = d_n(tau) over the
/// widehat(pad_n) transform, inverse-transformed and truncated to k values.
/// Throws SingularSliceMatrix with the offending tau.
SolveReport solve_lu_approx(const ReachabilitySystem& system, std::size_t pad_n);

/// Max-abs residual of a candidate solution against the original system.
double fixed_point_residual(const ReachabilitySystem& system, const Hypervector& f);

} // namespace smrm
