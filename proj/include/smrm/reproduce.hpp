#pragma once

#include <set>
#include <string>

#include "smrm/model.hpp"

namespace smrm {

/// Five-state chain with one absorbing goal; every transition carries a
/// Binomial(100, 0.5) reward. Solved over r = 0..149 in the source study.
Smrm toy_model();

/// Waste-treatment process: working / failed-tank-not-full /
/// failed-tank-full, with geometric and discrete-Weibull sojourn times.
Smrm waste_treatment_model();

/// Coronary-patient movement between nine hospital units with Weibull
/// transition times. `target` picks the absorbing unit of interest.
Smrm coronary_model(const std::string& target);

/// The three absorbing units of the coronary model.
const std::set<std::string>& coronary_absorbing_units();

} // namespace smrm
