#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "smrm/iterative.hpp"
#include "smrm/model.hpp"
#include "smrm/types.hpp"

namespace smrm {

/// N equidistant points on [0,b]: x_j = j*b/(N-1).
struct QuadratureGrid {
    double b = 0.0;
    std::size_t n_points = 0;

    QuadratureGrid() = default;
    QuadratureGrid(double bound, std::size_t n);

    double step() const { return b / static_cast<double>(n_points - 1); }
    double point(std::size_t j) const { return static_cast<double>(j) * step(); }
    bool operator==(const QuadratureGrid& o) const;

    /// Grid with 2N-1 points on the same interval; coarse points are a
    /// subset of the fine ones.
    QuadratureGrid refined() const { return QuadratureGrid(b, 2 * n_points - 1); }
};

/// pdf samples on a grid; may be a partial density.
struct SampledDensity {
    QuadratureGrid grid;
    Vec values;

    SampledDensity() = default;
    SampledDensity(QuadratureGrid g, Vec v);
};

enum class QuadRule { RiemannLeft, RiemannRight, Trapezoid };

/// Right Riemann approximation of (f*g): h * conv_N(f, g with g[0] zeroed).
SampledDensity conv_riemann_right(const SampledDensity& f, const SampledDensity& g);
SampledDensity conv_riemann_left(const SampledDensity& f, const SampledDensity& g);

/// Average of the left and right Riemann results.
SampledDensity conv_trapezoid(const SampledDensity& f, const SampledDensity& g);

SampledDensity conv_rule(QuadRule rule, const SampledDensity& f, const SampledDensity& g);

/// 1 = trapezoid, 2 = Simpson, 3 = Boole; capped at 6.
struct RombergLevel {
    std::size_t l = 1;
    explicit RombergLevel(std::size_t level);
};

/// Richardson combination of trapezoid results on nested grids
/// (N, 2N-1, ..., 2^(l-1)(N-1)+1 points), down-sampled to the coarsest grid.
/// hierarchy[j] must live on grid j refinements of hierarchy[0].
SampledDensity conv_romberg(const std::vector<SampledDensity>& trapezoid_hierarchy,
                            RombergLevel level);

/// Deconvolution p*f_x (/) (delta - q*f_y) by its geometric series, truncated
/// at m convolution powers, each approximated by the chosen rule.
SampledDensity dvc(const SampledDensity& f_x, double p, double q, const SampledDensity& f_y,
                   std::size_t m, QuadRule rule = QuadRule::RiemannRight);

/// Preprocessed continuous system over S_?. Reward distributions are
/// retained so nested grids can be resampled for Romberg runs.
struct ContinuousSystem {
    std::vector<std::string> s_question;
    std::vector<std::size_t> s_index;
    Vec a;                                       // m*m row-major
    std::vector<RewardDist> g_dists;             // m*m, row-major; valid where a > 0
    std::vector<std::vector<std::pair<double, RewardDist>>> h_parts; // per state, into B
    QuadratureGrid grid;
    bool reach_prob_one = false;

    std::size_t size() const { return s_question.size(); }
    double prob(std::size_t i, std::size_t j) const { return a[i * size() + j]; }

    Hypermatrix sample_g(const QuadratureGrid& g) const;
    Hypervector sample_h(const QuadratureGrid& g) const;
};

ContinuousSystem preprocess_continuous(const Smrm& model, const QuadratureGrid& grid);

/// Power iteration with convolution replaced by the chosen quadrature rule.
/// For Romberg level l, the trapezoid solver is run to convergence on each
/// nested grid and the converged solutions are combined.
SolveReport solve_power_continuous(const ContinuousSystem& system, const IterationConfig& cfg,
                                   QuadRule rule);
SolveReport solve_power_romberg(const ContinuousSystem& system, const IterationConfig& cfg,
                                RombergLevel level);

/// Jacobi iteration with H and kappa precomputed through dvc.
SolveReport solve_jacobi_continuous(const ContinuousSystem& system, const IterationConfig& cfg,
                                    QuadRule rule, std::size_t m_terms);

} // namespace smrm
