#pragma once

#include <cstddef>

#include "smrm/model.hpp"
#include "smrm/types.hpp"

namespace smrm {

struct IterationConfig {
    double epsilon = 1e-7;
    std::size_t max_iterations = 2000;
    double divergence_threshold = 1e2;
    bool record_history = false;

    void check() const; // epsilon must stay below the divergence guard
};

/// Power iteration f <- (A o G) (*) f + h from f = 0, entirely with
/// widetilde-padded transforms; iterate entries at or beyond k are re-zeroed
/// every step. Stops when the max-abs difference drops below epsilon.
SolveReport solve_power_exact(const ReachabilitySystem& system, const IterationConfig& cfg);

/// Same fixed point, iterated in the frequency domain with widehat(pad_m)
/// spectra; converges when both real and imaginary max-abs differences are
/// below epsilon, and inverse-transforms once at the end.
SolveReport solve_power_approx(const ReachabilitySystem& system, const IterationConfig& cfg,
                               std::size_t pad_m);

/// Jacobi iteration over (H, kappa) with H and kappa obtained by one
/// deconvolution per row via the inverse-divisor trick.
SolveReport solve_jacobi(const ReachabilitySystem& system, const IterationConfig& cfg);

/// Jacobi with rows updated in ascending index order inside one sweep,
/// already-updated rows feeding later ones.
SolveReport solve_gauss_seidel(const ReachabilitySystem& system, const IterationConfig& cfg);

/// Exactly n power iterations from zero: the step-bounded first-passage
/// density Pr(r and reaching B within n steps).
Hypervector bounded_density(const ReachabilitySystem& system, std::size_t n);

} // namespace smrm
