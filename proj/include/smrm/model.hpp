#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smrm/types.hpp"

namespace smrm {

// ---------------------------------------------------------------------------
// Reward distribution families
// ---------------------------------------------------------------------------

struct DiracZero {};

struct ExplicitLattice {
    Vec pmf;
};

struct Binomial {
    std::uint64_t n;
    double p;
};

/// Support starts at t = 1: pmf(t) = (1-p)^(t-1) p.
struct Geometric {
    double p;
};

/// pmf(t) = q^((t-1)^b) - q^(t^b) for t >= 1.
struct DiscreteWeibull {
    double q;
    double b;
};

/// pmf(t) = exp(-a p^(t+1)) - exp(-a p^t) for t >= 0; defaults a = 5.
struct DiscreteGumbel {
    double p;
    double a = 5.0;
};

struct UniformComponent {
    double weight;
    double lo;
    double hi;
};

/// Piecewise-constant pdf; each component is uniform on the half-open
/// interval [lo, hi).
struct UniformMixture {
    std::vector<UniformComponent> components;
};

struct Exponential {
    double rate;
};

/// pdf(x) = (shape/scale) x^(shape-1) exp(-x^shape / scale) for x > 0.
struct WeibullCont {
    double shape;
    double scale;
};

using RewardDist = std::variant<DiracZero, ExplicitLattice, Binomial, Geometric, DiscreteWeibull,
                                DiscreteGumbel, UniformMixture, Exponential, WeibullCont>;

bool is_lattice_family(const RewardDist& dist);

/// Family parameter check; throws InvalidParameter on violation.
void check_parameters(const RewardDist& dist);

/// Analytic mean where closed forms exist; numeric tail summation for the
/// discrete Weibull and Gumbel (terms dropped below 1e-14).
double dist_mean(const RewardDist& dist);

/// Deterministic integer value if the distribution is a point mass, else
/// nullopt. DiracZero yields 0.
std::optional<std::int64_t> deterministic_value(const RewardDist& dist);

/// pmf vector over 0..k-1 for lattice families. Tail mass beyond k-1 is
/// dropped, not renormalized; *tail_mass reports it when non-null.
Vec density_of(const RewardDist& dist, std::size_t k, double* tail_mass = nullptr);

struct QuadratureGrid; // continuous sampling lives in continuous.hpp

/// pdf samples at the N equidistant points of [0,b] for continuous families.
Vec density_of(const RewardDist& dist, const QuadratureGrid& grid);

// ---------------------------------------------------------------------------
// The model
// ---------------------------------------------------------------------------

struct Smrm {
    std::vector<std::string> states;
    std::vector<Vec> transition_probs;               // row-indexed by source
    std::map<std::pair<std::size_t, std::size_t>, RewardDist> rewards;
    Vec initial_dist;                                // optional, unused by solvers
    std::set<std::size_t> target_set;

    std::size_t num_states() const { return states.size(); }
    double prob(std::size_t s, std::size_t t) const { return transition_probs[s][t]; }
    std::optional<std::size_t> state_index(const std::string& name) const;
};

/// Empty result iff all model invariants hold. Diagnostic, never throws.
std::vector<std::string> validate(const Smrm& model);

/// Pr(s |= eventually B) for every state: 1 on B, 0 outside Pre*(B), and the
/// solution of the linear system x = Ax + b on the rest.
Vec reach_probabilities(const Smrm& model, const std::set<std::size_t>& target);

/// Preprocessed discrete system over S_? = Pre*(B) \ B.
struct ReachabilitySystem {
    std::vector<std::string> s_question;  // retained state names, index order
    std::vector<std::size_t> s_index;     // their indices in the source model
    Vec a;                                // m*m row-major probabilities
    Hypermatrix g;                        // reward pmfs on S_? x S_?
    Hypervector h;                        // sum over B of P(s,u) * pmf(rew(s,u))
    std::size_t k = 0;
    bool reach_prob_one = false;

    // metadata
    Vec h_prob_weight;                    // per state: total probability into B
    Vec g_tail_mass;                      // m*m dropped pmf tail beyond k-1
    Vec h_tail_mass;                      // per state: dropped tail in h

    std::size_t size() const { return s_question.size(); }
    double prob(std::size_t i, std::size_t j) const { return a[i * size() + j]; }
};

/// Make target states absorbing, drop states that never reach B, assemble
/// (A, G, h) truncated at k. Throws EmptyTarget / NoReachableState.
ReachabilitySystem preprocess(const Smrm& model, std::size_t k);

} // namespace smrm
