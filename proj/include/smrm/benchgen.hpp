#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "smrm/continuous.hpp"
#include "smrm/model.hpp"
#include "smrm/types.hpp"

namespace smrm {

/// Deterministic 64-bit generator with explicit uniform/index draws, so
/// fixed-seed outputs are identical across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64();
    double next_double();                      // uniform [0,1)
    std::size_t next_index(std::size_t n);     // uniform 0..n-1
    Rng split(std::uint64_t stream) const;     // independent worker stream

  private:
    std::uint64_t state_;
};

/// (A, b, P): transition matrix among ordinary states, probability of
/// stepping straight into the goal, and the combined matrix the generator
/// produced. Orientation quirks of each recipe are preserved as-is.
struct GeneratedChain {
    std::vector<Vec> a;
    Vec b;
    std::vector<Vec> p;
};

GeneratedChain gen_mc_uniform(std::size_t num_states, Rng& rng);
GeneratedChain gen_mc_block(std::size_t num_states, Rng& rng, std::size_t num_pass = 200,
                            double block_scale = 5.0);
GeneratedChain gen_mc_npass(std::size_t num_states, Rng& rng, std::size_t num_pass = 1000);
GeneratedChain gen_mc_sparse(std::size_t num_states, Rng& rng, double density = 0.1);

/// Reward-system assembly for generated chains: every (i,j) transition gets
/// a pmf of the given family with its free parameter drawn from
/// [param_lo, param_hi).
ReachabilitySystem system_from_chain(const GeneratedChain& chain, std::size_t k,
                                     const std::string& pmf_family, double param_lo,
                                     double param_hi, Rng& rng);

/// Same reward assignment but as a full model (ordinary states plus one
/// absorbing goal), serializable through the model file writer. Chains whose
/// rows are not stochastic (block orientation quirk) still convert; validate
/// reports them.
Smrm smrm_from_chain(const GeneratedChain& chain, const std::string& pmf_family, double param_lo,
                     double param_hi, Rng& rng);

struct Trace {
    std::vector<std::size_t> path;
    double cumulated_reward = 0.0;
    enum class End { ReachedGoal, RewardBound } terminated_by = End::ReachedGoal;
};

/// Simulates traces by categorical transition draws and per-transition
/// reward draws, terminating on goal entry or on accumulating at least
/// reward_bound. Throws NonterminatingModel past 1e7 steps.
std::vector<Trace> sample_traces(const Smrm& model, std::size_t start, std::size_t count,
                                 double reward_bound, Rng& rng);

/// Relative frequencies of goal-terminated traces' rewards on 0..k-1;
/// bound-terminated traces contribute no mass.
Vec empirical_density(const std::vector<Trace>& traces, std::size_t k);

/// Continuous variant: histogram over the grid cells, scaled to density.
Vec empirical_density(const std::vector<Trace>& traces, const QuadratureGrid& grid);

/// One reward draw from a distribution (inverse-cdf for continuous
/// families, categorical with tail redraw for lattice ones).
double sample_reward(const RewardDist& dist, Rng& rng);

/// Traces as CSV rows: index, terminator, cumulated reward, path.
void write_traces_csv(std::ostream& out, const std::vector<Trace>& traces,
                      const std::vector<std::string>& state_names);

} // namespace smrm
