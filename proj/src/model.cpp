#include "smrm/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <Eigen/Dense>

#include "smrm/continuous.hpp"
#include "smrm/errors.hpp"

namespace smrm {

namespace {

constexpr double kRowSumTol = 1e-9;

double binom_pmf(std::uint64_t n, double p, std::uint64_t t) {
    if (t > n) return 0.0;
    if (p <= 0.0) return t == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return t == n ? 1.0 : 0.0;
    const double nd = static_cast<double>(n);
    const double td = static_cast<double>(t);
    const double log_pmf = std::lgamma(nd + 1.0) - std::lgamma(td + 1.0) -
                           std::lgamma(nd - td + 1.0) + td * std::log(p) +
                           (nd - td) * std::log1p(-p);
    return std::exp(log_pmf);
}

} // namespace

bool is_lattice_family(const RewardDist& dist) {
    return std::visit(
        [](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            return std::is_same_v<T, DiracZero> || std::is_same_v<T, ExplicitLattice> ||
                   std::is_same_v<T, Binomial> || std::is_same_v<T, Geometric> ||
                   std::is_same_v<T, DiscreteWeibull> || std::is_same_v<T, DiscreteGumbel>;
        },
        dist);
}

void check_parameters(const RewardDist& dist) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ExplicitLattice>) {
                double sum = 0.0;
                for (double v : d.pmf) {
                    if (v < 0.0) throw InvalidParameter("lattice: negative pmf entry");
                    sum += v;
                }
                if (sum > 1.0 + 1e-9) throw InvalidParameter("lattice: pmf mass exceeds 1");
            } else if constexpr (std::is_same_v<T, Binomial>) {
                if (d.p < 0.0 || d.p > 1.0) throw InvalidParameter("binomial: p outside [0,1]");
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (d.p <= 0.0 || d.p > 1.0) throw InvalidParameter("geometric: p outside (0,1]");
            } else if constexpr (std::is_same_v<T, DiscreteWeibull>) {
                if (d.q <= 0.0 || d.q >= 1.0)
                    throw InvalidParameter("discrete-weibull: q outside (0,1)");
                if (d.b <= 0.0) throw InvalidParameter("discrete-weibull: b must be positive");
            } else if constexpr (std::is_same_v<T, DiscreteGumbel>) {
                if (d.p <= 0.0 || d.p >= 1.0)
                    throw InvalidParameter("discrete-gumbel: p outside (0,1)");
                if (d.a <= 0.0) throw InvalidParameter("discrete-gumbel: a must be positive");
            } else if constexpr (std::is_same_v<T, UniformMixture>) {
                if (d.components.empty()) throw InvalidParameter("uniform-mixture: empty");
                double wsum = 0.0;
                for (const auto& c : d.components) {
                    if (c.weight < 0.0) throw InvalidParameter("uniform-mixture: negative weight");
                    if (c.lo < 0.0) throw InvalidParameter("uniform-mixture: negative support");
                    if (c.hi <= c.lo) throw InvalidParameter("uniform-mixture: hi <= lo");
                    wsum += c.weight;
                }
                if (std::abs(wsum - 1.0) > 1e-9)
                    throw InvalidParameter("uniform-mixture: weights must sum to 1");
            } else if constexpr (std::is_same_v<T, Exponential>) {
                if (d.rate <= 0.0) throw InvalidParameter("exponential: rate must be positive");
            } else if constexpr (std::is_same_v<T, WeibullCont>) {
                if (d.shape <= 0.0 || d.scale <= 0.0)
                    throw InvalidParameter("weibull: parameters must be positive");
            }
        },
        dist);
}

double dist_mean(const RewardDist& dist) {
    check_parameters(dist);
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, DiracZero>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, ExplicitLattice>) {
                double m = 0.0;
                for (std::size_t r = 0; r < d.pmf.size(); ++r) m += static_cast<double>(r) * d.pmf[r];
                return m;
            } else if constexpr (std::is_same_v<T, Binomial>) {
                return static_cast<double>(d.n) * d.p;
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return 1.0 / d.p;
            } else if constexpr (std::is_same_v<T, DiscreteWeibull>) {
                // E[X] = sum_{j>=0} q^(j^b), telescoped from the pmf.
                double m = 0.0;
                for (std::uint64_t j = 0;; ++j) {
                    const double term = std::pow(d.q, std::pow(static_cast<double>(j), d.b));
                    m += term;
                    if (j > 0 && term < 1e-14) break;
                }
                return m;
            } else if constexpr (std::is_same_v<T, DiscreteGumbel>) {
                double m = 0.0;
                for (std::uint64_t t = 1;; ++t) {
                    const double td = static_cast<double>(t);
                    const double pmf = std::exp(-d.a * std::pow(d.p, td + 1.0)) -
                                       std::exp(-d.a * std::pow(d.p, td));
                    m += td * pmf;
                    if (pmf < 1e-14 && td * pmf < 1e-14) break;
                }
                return m;
            } else if constexpr (std::is_same_v<T, UniformMixture>) {
                double m = 0.0;
                for (const auto& c : d.components) m += c.weight * 0.5 * (c.lo + c.hi);
                return m;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 / d.rate;
            } else { // WeibullCont
                return std::pow(d.scale, 1.0 / d.shape) * std::tgamma(1.0 + 1.0 / d.shape);
            }
        },
        dist);
}

std::optional<std::int64_t> deterministic_value(const RewardDist& dist) {
    if (std::holds_alternative<DiracZero>(dist)) return 0;
    if (const auto* lat = std::get_if<ExplicitLattice>(&dist)) {
        std::optional<std::int64_t> where;
        for (std::size_t r = 0; r < lat->pmf.size(); ++r) {
            if (lat->pmf[r] == 0.0) continue;
            if (where || std::abs(lat->pmf[r] - 1.0) > 1e-12) return std::nullopt;
            where = static_cast<std::int64_t>(r);
        }
        return where ? where : std::optional<std::int64_t>(0);
    }
    return std::nullopt;
}

Vec density_of(const RewardDist& dist, std::size_t k, double* tail_mass) {
    if (k == 0) throw DegenerateLength("density_of: k must be positive");
    check_parameters(dist);
    if (!is_lattice_family(dist))
        throw InvalidParameter("density_of: continuous family sampled on a lattice");
    Vec out(k, 0.0);
    double covered = 1.0;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, DiracZero>) {
                out[0] = 1.0;
            } else if constexpr (std::is_same_v<T, ExplicitLattice>) {
                double total = 0.0, kept = 0.0;
                for (double v : d.pmf) total += v;
                for (std::size_t r = 0; r < std::min(k, d.pmf.size()); ++r) {
                    out[r] = d.pmf[r];
                    kept += d.pmf[r];
                }
                covered = 1.0 - (total - kept);
            } else if constexpr (std::is_same_v<T, Binomial>) {
                for (std::size_t t = 0; t < k; ++t) out[t] = binom_pmf(d.n, d.p, t);
                double kept = 0.0;
                for (double v : out) kept += v;
                covered = k > d.n ? 1.0 : kept;
            } else if constexpr (std::is_same_v<T, Geometric>) {
                for (std::size_t t = 1; t < k; ++t)
                    out[t] = std::pow(1.0 - d.p, static_cast<double>(t) - 1.0) * d.p;
                // remaining tail is (1-p)^(k-1)
                covered = 1.0 - std::pow(1.0 - d.p, static_cast<double>(k) - 1.0);
            } else if constexpr (std::is_same_v<T, DiscreteWeibull>) {
                for (std::size_t t = 1; t < k; ++t) {
                    const double td = static_cast<double>(t);
                    out[t] = std::pow(d.q, std::pow(td - 1.0, d.b)) -
                             std::pow(d.q, std::pow(td, d.b));
                }
                covered = 1.0 - std::pow(d.q, std::pow(static_cast<double>(k) - 1.0, d.b));
            } else if constexpr (std::is_same_v<T, DiscreteGumbel>) {
                for (std::size_t t = 0; t < k; ++t) {
                    const double td = static_cast<double>(t);
                    out[t] = std::exp(-d.a * std::pow(d.p, td + 1.0)) -
                             std::exp(-d.a * std::pow(d.p, td));
                }
                // the family itself is defective by exp(-a); only the loss
                // beyond k-1 counts as truncation tail
                covered = std::exp(-d.a * std::pow(d.p, static_cast<double>(k)));
            }
        },
        dist);
    if (tail_mass) *tail_mass = std::max(0.0, 1.0 - covered);
    return out;
}

std::optional<std::size_t> Smrm::state_index(const std::string& name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == name) return i;
    return std::nullopt;
}

std::vector<std::string> validate(const Smrm& model) {
    std::vector<std::string> violations;
    const std::size_t n = model.num_states();
    if (model.transition_probs.size() != n) {
        violations.push_back("transition matrix row count differs from state count");
        return violations;
    }
    for (std::size_t s = 0; s < n; ++s) {
        const auto& row = model.transition_probs[s];
        if (row.size() != n) {
            std::ostringstream os;
            os << "row " << s << " has " << row.size() << " entries, expected " << n;
            violations.push_back(os.str());
            continue;
        }
        double sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (row[t] < 0.0 || row[t] > 1.0) {
                std::ostringstream os;
                os << "entry (" << s << "," << t << ") = " << row[t] << " outside [0,1]";
                violations.push_back(os.str());
            }
            sum += row[t];
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            std::ostringstream os;
            os << "row " << s << " sums to " << sum;
            violations.push_back(os.str());
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (row[t] > 0.0 && !model.rewards.count({s, t})) {
                std::ostringstream os;
                os << "transition (" << s << "," << t << ") has no reward distribution";
                violations.push_back(os.str());
            }
        }
    }
    if (model.target_set.empty()) violations.push_back("target set is empty");
    for (std::size_t b : model.target_set) {
        if (b >= n) {
            std::ostringstream os;
            os << "target state index " << b << " out of range";
            violations.push_back(os.str());
        }
    }
    for (const auto& [key, dist] : model.rewards) {
        try {
            check_parameters(dist);
        } catch (const InvalidParameter& e) {
            std::ostringstream os;
            os << "reward (" << key.first << "," << key.second << "): " << e.what();
            violations.push_back(os.str());
        }
    }
    if (!model.initial_dist.empty()) {
        if (model.initial_dist.size() != n)
            violations.push_back("initial distribution length differs from state count");
        for (double p : model.initial_dist)
            if (p < 0.0 || p > 1.0) {
                violations.push_back("initial distribution entry outside [0,1]");
                break;
            }
    }
    return violations;
}

namespace {

// Pre*(B): reverse BFS over positive-probability edges.
std::vector<bool> reaches_target(const Smrm& model, const std::set<std::size_t>& target) {
    const std::size_t n = model.num_states();
    std::vector<bool> reach(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t b : target) {
        reach[b] = true;
        queue.push_back(b);
    }
    while (!queue.empty()) {
        const std::size_t t = queue.front();
        queue.pop_front();
        for (std::size_t s = 0; s < n; ++s) {
            if (!reach[s] && model.prob(s, t) > 0.0 && !target.count(s)) {
                reach[s] = true;
                queue.push_back(s);
            }
        }
    }
    return reach;
}

} // namespace

Vec reach_probabilities(const Smrm& model, const std::set<std::size_t>& target) {
    const std::size_t n = model.num_states();
    if (target.empty()) throw EmptyTarget("reach_probabilities: empty target set");
    const auto reach = reaches_target(model, target);

    std::vector<std::size_t> sq;
    for (std::size_t s = 0; s < n; ++s)
        if (reach[s] && !target.count(s)) sq.push_back(s);

    Vec result(n, 0.0);
    for (std::size_t b : target) result[b] = 1.0;
    if (sq.empty()) return result;

    const std::size_t m = sq.size();
    Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) sys(i, j) -= model.prob(sq[i], sq[j]);
        for (std::size_t b : target) rhs(i) += model.prob(sq[i], b);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (pivot_min < 1e-14 * std::max(1.0, sys.cwiseAbs().maxCoeff()))
        throw SingularSystem("reach_probabilities: singular linear system");
    Eigen::VectorXd x = lu.solve(rhs);
    for (std::size_t i = 0; i < m; ++i) result[sq[i]] = std::clamp(x(i), 0.0, 1.0);
    return result;
}

ReachabilitySystem preprocess(const Smrm& model, std::size_t k) {
    if (k == 0) throw DegenerateLength("preprocess: k must be positive");
    if (model.target_set.empty()) throw EmptyTarget("preprocess: target set is empty");

    // Target states become self-absorbent with zero-reward loops; their rows
    // never enter the assembled system, so the rewrite is implicit.
    const auto reach = reaches_target(model, model.target_set);
    std::vector<std::size_t> sq;
    for (std::size_t s = 0; s < model.num_states(); ++s)
        if (reach[s] && !model.target_set.count(s)) sq.push_back(s);
    if (sq.empty()) throw NoReachableState("preprocess: no state outside B reaches B");

    const std::size_t m = sq.size();
    ReachabilitySystem sys;
    sys.k = k;
    sys.s_index = sq;
    for (std::size_t s : sq) sys.s_question.push_back(model.states[s]);
    sys.a.assign(m * m, 0.0);
    sys.g = Hypermatrix(k, m, m);
    sys.h = Hypervector(k, m);
    sys.h_prob_weight.assign(m, 0.0);
    sys.g_tail_mass.assign(m * m, 0.0);
    sys.h_tail_mass.assign(m, 0.0);

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double p = model.prob(sq[i], sq[j]);
            sys.a[i * m + j] = p;
            if (p > 0.0) {
                double tail = 0.0;
                sys.g.set_slice(i, j, density_of(model.rewards.at({sq[i], sq[j]}), k, &tail));
                sys.g_tail_mass[i * m + j] = tail;
            }
        }
        Vec hrow(k, 0.0);
        for (std::size_t b : model.target_set) {
            const double p = model.prob(sq[i], b);
            if (p <= 0.0) continue;
            double tail = 0.0;
            const Vec pmf = density_of(model.rewards.at({sq[i], b}), k, &tail);
            for (std::size_t r = 0; r < k; ++r) hrow[r] += p * pmf[r];
            sys.h_prob_weight[i] += p;
            sys.h_tail_mass[i] += p * tail;
        }
        sys.h.set_row(i, hrow);
    }

    const Vec probs = reach_probabilities(model, model.target_set);
    sys.reach_prob_one = true;
    for (std::size_t s : sq)
        if (probs[s] < 1.0 - 1e-9) sys.reach_prob_one = false;
    return sys;
}

} // namespace smrm
