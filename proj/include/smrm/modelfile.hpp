#pragma once

#include <iosfwd>
#include <string>

#include "smrm/model.hpp"

namespace smrm {

/// Parses the text model format:
///
///   states: s0 s1 s2
///   target: s2
///   initial: s0=1.0            # optional
///   transitions:
///     s0 -> s1 prob=0.95 reward=family(geometric, 0.8)
///     s1 -> s2 prob=1.0  reward=lattice([0.5, 0.25, 0.25])
///
/// Reward specs are family(name, params...) or lattice([v0, v1, ...]);
/// unknown family names are rejected. '#' starts a comment.
Smrm parse_model(std::istream& in);
Smrm load_model(const std::string& path);

/// Reward spec alone, e.g. "family(exponential, 0.5)".
RewardDist parse_reward_spec(const std::string& spec);
std::string format_reward_spec(const RewardDist& dist);

void write_model(std::ostream& out, const Smrm& model);
void save_model(const std::string& path, const Smrm& model);

} // namespace smrm
