#include "smrm/reproduce.hpp"

#include <array>

#include "smrm/errors.hpp"

namespace smrm {

Smrm toy_model() {
    Smrm model;
    model.states = {"s0", "s1", "s2", "s3", "s4"};
    const std::array<std::array<double, 4>, 4> a = {{
        {0.1288838, 0.38242891, 0.12495781, 0.13139189},
        {0.27758284, 0.09654253, 0.15592425, 0.24690511},
        {0.10418887, 0.18054794, 0.1492027, 0.32815053},
        {0.33540355, 0.31410283, 0.16746947, 0.1316041},
    }};
    // goal-entry probabilities are the row residuals 1 - sum(A row); the
    // third one prints as 0.23790995 in the source tables, an off-by-1e-8
    // rounding that would leave the row substochastic
    const std::array<double, 4> b = {0.23233759, 0.22304527, 0.23790996, 0.05142005};

    model.transition_probs.assign(5, Vec(5, 0.0));
    const Binomial reward{100, 0.5};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            model.transition_probs[i][j] = a[i][j];
            model.rewards[{i, j}] = reward;
        }
        model.transition_probs[i][4] = b[i];
        model.rewards[{i, 4}] = reward;
    }
    model.transition_probs[4][4] = 1.0;
    model.rewards[{4, 4}] = DiracZero{};
    model.initial_dist = {1.0, 0.0, 0.0, 0.0, 0.0};
    model.target_set = {4};
    return model;
}

Smrm waste_treatment_model() {
    Smrm model;
    model.states = {"working", "failed-tank-not-full", "failed-tank-full"};
    model.transition_probs = {
        {0.0, 1.0, 0.0},
        {0.95, 0.0, 0.05},
        {1.0, 0.0, 0.0},
    };
    model.rewards[{0, 1}] = Geometric{0.8};
    model.rewards[{1, 0}] = DiscreteWeibull{0.3, 0.5};
    model.rewards[{1, 2}] = DiscreteWeibull{0.5, 0.7};
    model.rewards[{2, 0}] = DiscreteWeibull{0.6, 0.9};
    model.target_set = {2};
    return model;
}

Smrm coronary_model(const std::string& target) {
    Smrm model;
    model.states = {"CCU", "PCCU", "ICU", "MED", "SURG", "AMB", "ECF", "HOME", "DIED"};
    model.transition_probs = {
        {0.0000, 0.7447, 0.0084, 0.1339, 0.0042, 0.0063, 0.0000, 0.0063, 0.0962},
        {0.0192, 0.0000, 0.0137, 0.0247, 0.0027, 0.0027, 0.0577, 0.8298, 0.0495},
        {0.0000, 0.5833, 0.0000, 0.1667, 0.0833, 0.0000, 0.0000, 0.0000, 0.1667},
        {0.0000, 0.0135, 0.0405, 0.0000, 0.0135, 0.0270, 0.0811, 0.7028, 0.1216},
        {0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000, 0.0000},
        {0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000, 0.0000},
        {0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000, 0.0000, 0.0000},
        {0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000, 0.0000},
        {0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000},
    };

    const WeibullCont f1{4.738025, 4566277818.13};
    const WeibullCont f2{2.207438, 14541.6089};
    const WeibullCont f3{0.766338, 16.6991};
    const WeibullCont f4{2.303331, 1017649.5158};
    const WeibullCont f6{1.623492, 4707.3132};

    auto set = [&](std::size_t i, std::size_t j, const WeibullCont& w) {
        model.rewards[{i, j}] = w;
    };
    set(0, 1, f1); set(0, 2, f1); set(0, 3, f1); set(0, 4, f1);
    set(0, 5, f2); set(0, 7, f2); set(0, 8, f3);
    set(1, 0, f4); set(1, 2, f1); set(1, 3, f4); set(1, 4, f1);
    set(1, 5, f1); set(1, 6, f4); set(1, 7, f4); set(1, 8, f6);
    set(2, 1, f4); set(2, 3, f1); set(2, 4, f1); set(2, 8, f3);
    set(3, 1, f4); set(3, 2, f4); set(3, 4, f4); set(3, 5, f4);
    set(3, 6, f4); set(3, 7, f4); set(3, 8, f6);
    set(4, 7, f4);
    set(5, 7, f4);
    model.rewards[{6, 6}] = DiracZero{};
    model.rewards[{7, 7}] = DiracZero{};
    model.rewards[{8, 8}] = DiracZero{};

    const auto idx = model.state_index(target);
    if (!idx || !coronary_absorbing_units().count(target))
        throw InvalidParameter("coronary_model: target must be ECF, HOME or DIED");
    model.target_set = {*idx};
    model.initial_dist.assign(9, 0.0);
    model.initial_dist[0] = 1.0;
    return model;
}

const std::set<std::string>& coronary_absorbing_units() {
    static const std::set<std::string> units = {"ECF", "HOME", "DIED"};
    return units;
}

} // namespace smrm
