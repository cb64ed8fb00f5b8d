#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "smrm/continuous.hpp"
#include "smrm/model.hpp"
#include "smrm/types.hpp"

namespace smrm {

enum class DensityMode { Discrete, Continuous };

/// Cumulative sum for lattice densities, cumulative trapezoid for sampled
/// pdfs (needs the grid step). Nondecreasing; final value may stay below 1
/// for partial densities.
Vec cdf_from_density(const Vec& density, DensityMode mode, double step = 1.0);

/// F(b) - F(a) over a cdf vector. Discrete abscissas evaluate at floor(x);
/// continuous ones interpolate linearly between grid points.
double interval_probability(const Vec& cdf, DensityMode mode, double step, double a, double b);

/// Smallest abscissa r with F(r) > p. Discrete: exact index; continuous:
/// linear interpolation between the bracketing grid points. Throws
/// QuantileOutOfRange (with a hint to enlarge the solved interval) when the
/// cdf never exceeds p.
double quantile(const Vec& cdf, DensityMode mode, double step, double p);

/// Expected cumulated reward to absorption per retained state, solved as
/// r = (I-A)^{-1} b with b built from the reward means. Requires almost-sure
/// reachability; throws ReachabilityNotAlmostSure otherwise.
Vec expected_reward(const Smrm& model, const std::set<std::size_t>& target);

/// Interval-length suggestion ExpRew + gamma * VarRew with the variance taken
/// numerically from a solved truncated density.
double suggest_truncation(const Vec& density, DensityMode mode, double step, double gamma);

/// Probability density of reaching B in exactly one step: the system's h.
Hypervector next_step_density(const ReachabilitySystem& system);

struct CdfView {
    const Vec* cdf;
    DensityMode mode;
    double step;
};

/// Product of per-dimension cdf evaluations; components must be mutually
/// independent (caller-asserted).
double multivariate_cdf(const std::vector<CdfView>& per_dim, const std::vector<double>& r_vec);

/// Reward-bounded reachability x_{s,p} for p = 0..r over a model with
/// deterministic nonnegative integer rewards, solving a linear system at
/// each level when zero-reward transitions exist. Rows are model states;
/// x = 1 on B for every p.
std::vector<Vec> mrm_bounded_reachability(const Smrm& model, const std::set<std::size_t>& target,
                                          std::int64_t r);

} // namespace smrm
