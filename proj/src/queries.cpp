#include "smrm/queries.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "smrm/errors.hpp"

namespace smrm {

Vec cdf_from_density(const Vec& density, DensityMode mode, double step) {
    Vec cdf(density.size(), 0.0);
    if (density.empty()) return cdf;
    if (mode == DensityMode::Discrete) {
        double acc = 0.0;
        for (std::size_t r = 0; r < density.size(); ++r) {
            acc += density[r];
            cdf[r] = acc;
        }
    } else {
        cdf[0] = 0.0;
        for (std::size_t j = 1; j < density.size(); ++j)
            cdf[j] = cdf[j - 1] + 0.5 * step * (density[j - 1] + density[j]);
    }
    return cdf;
}

namespace {

double eval_cdf(const Vec& cdf, DensityMode mode, double step, double x) {
    if (x < 0.0) return 0.0;
    if (mode == DensityMode::Discrete) {
        const std::size_t idx = static_cast<std::size_t>(std::floor(x));
        return cdf[std::min(idx, cdf.size() - 1)];
    }
    const double pos = x / step;
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= cdf.size()) return cdf.back();
    const double frac = pos - static_cast<double>(lo);
    return cdf[lo] + frac * (cdf[lo + 1] - cdf[lo]);
}

} // namespace

double interval_probability(const Vec& cdf, DensityMode mode, double step, double a, double b) {
    if (a > b) throw InvalidParameter("interval_probability: requires a <= b");
    const double bound =
        mode == DensityMode::Discrete ? static_cast<double>(cdf.size() - 1)
                                      : step * static_cast<double>(cdf.size() - 1);
    if (a < 0.0 || b > bound + 1e-12)
        throw InvalidParameter("interval_probability: bounds outside the solved interval");
    return std::max(0.0, eval_cdf(cdf, mode, step, b) - eval_cdf(cdf, mode, step, a));
}

double quantile(const Vec& cdf, DensityMode mode, double step, double p) {
    if (p < 0.0 || p >= 1.0) throw InvalidParameter("quantile: p must be in [0,1)");
    if (cdf.empty() || cdf.back() <= p)
        throw QuantileOutOfRange(
            "quantile: cdf never exceeds the requested level; recompute with a larger interval");
    if (mode == DensityMode::Discrete) {
        for (std::size_t r = 0; r < cdf.size(); ++r)
            if (cdf[r] > p) return static_cast<double>(r);
    } else {
        for (std::size_t j = 0; j < cdf.size(); ++j) {
            if (cdf[j] > p) {
                if (j == 0) return 0.0;
                const double lo = cdf[j - 1], hi = cdf[j];
                const double frac = hi > lo ? (p - lo) / (hi - lo) : 1.0;
                return step * (static_cast<double>(j - 1) + frac);
            }
        }
    }
    throw QuantileOutOfRange("quantile: unreachable");
}

Vec expected_reward(const Smrm& model, const std::set<std::size_t>& target) {
    const Vec probs = reach_probabilities(model, target);
    for (std::size_t s = 0; s < probs.size(); ++s) {
        if (probs[s] < 1.0 - 1e-9) {
            std::ostringstream os;
            os << "expected_reward: state " << model.states[s]
               << " reaches the target with probability " << probs[s] << " < 1";
            throw ReachabilityNotAlmostSure(os.str());
        }
    }
    const std::size_t n = model.num_states();
    std::vector<std::size_t> sq;
    for (std::size_t s = 0; s < n; ++s)
        if (!target.count(s)) sq.push_back(s);

    Vec result(n, 0.0);
    if (sq.empty()) return result;
    const std::size_t m = sq.size();
    Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t t = 0; t < n; ++t) {
            const double p = model.prob(sq[i], t);
            if (p <= 0.0) continue;
            rhs(i) += p * dist_mean(model.rewards.at({sq[i], t}));
        }
        for (std::size_t j = 0; j < m; ++j) sys(i, j) -= model.prob(sq[i], sq[j]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (pivot_min < 1e-14 * std::max(1.0, sys.cwiseAbs().maxCoeff()))
        throw SingularSystem("expected_reward: singular linear system");
    Eigen::VectorXd x = lu.solve(rhs);
    for (std::size_t i = 0; i < m; ++i) result[sq[i]] = x(i);
    return result;
}

double suggest_truncation(const Vec& density, DensityMode mode, double step, double gamma) {
    double mass = 0.0, mean = 0.0, second = 0.0;
    for (std::size_t j = 0; j < density.size(); ++j) {
        const double x = mode == DensityMode::Discrete ? static_cast<double>(j)
                                                       : step * static_cast<double>(j);
        const double w = mode == DensityMode::Discrete ? density[j] : density[j] * step;
        mass += w;
        mean += x * w;
        second += x * x * w;
    }
    if (mass <= 0.0) return 0.0;
    mean /= mass;
    second /= mass;
    const double var = std::max(0.0, second - mean * mean);
    return mean + gamma * var;
}

Hypervector next_step_density(const ReachabilitySystem& system) { return system.h; }

double multivariate_cdf(const std::vector<CdfView>& per_dim, const std::vector<double>& r_vec) {
    if (per_dim.size() != r_vec.size())
        throw InvalidParameter("multivariate_cdf: dimension mismatch");
    double prod = 1.0;
    for (std::size_t i = 0; i < per_dim.size(); ++i)
        prod *= eval_cdf(*per_dim[i].cdf, per_dim[i].mode, per_dim[i].step, r_vec[i]);
    return prod;
}

std::vector<Vec> mrm_bounded_reachability(const Smrm& model, const std::set<std::size_t>& target,
                                          std::int64_t r) {
    if (r < 0) throw InvalidParameter("mrm_bounded_reachability: negative bound");
    const Vec probs = reach_probabilities(model, target);
    for (std::size_t s = 0; s < probs.size(); ++s) {
        if (probs[s] < 1.0 - 1e-9) {
            std::ostringstream os;
            os << "mrm_bounded_reachability: state " << model.states[s]
               << " reaches the target with probability " << probs[s] << " < 1";
            throw ReachabilityNotAlmostSure(os.str());
        }
    }
    const std::size_t n = model.num_states();
    std::vector<std::size_t> sq;
    for (std::size_t s = 0; s < n; ++s)
        if (!target.count(s)) sq.push_back(s);
    const std::size_t m = sq.size();

    // deterministic integer reward per positive transition out of S \ B
    std::vector<std::vector<std::int64_t>> rew(m, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < n; ++t) {
            if (model.prob(sq[i], t) <= 0.0) continue;
            const auto det = deterministic_value(model.rewards.at({sq[i], t}));
            if (!det || *det < 0)
                throw InvalidParameter(
                    "mrm_bounded_reachability: rewards must be deterministic nonnegative "
                    "integers");
            rew[i][t] = *det;
        }

    // zero-reward transitions among S \ B force a linear solve per level
    Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(m, m);
    bool any_zero_edge = false;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double p = model.prob(sq[i], sq[j]);
            if (p > 0.0 && rew[i][sq[j]] == 0) {
                sys(i, j) -= p;
                any_zero_edge = true;
            }
        }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    if (any_zero_edge) {
        const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (pivot_min < 1e-14 * std::max(1.0, sys.cwiseAbs().maxCoeff()))
            throw SingularSystem("mrm_bounded_reachability: singular zero-reward system");
    }

    std::vector<Vec> levels;
    std::vector<Vec> x_hist; // x_hist[p][i] over retained states
    for (std::int64_t p = 0; p <= r; ++p) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double prob = model.prob(sq[i], t);
                if (prob <= 0.0) continue;
                const std::int64_t w = rew[i][t];
                if (target.count(t)) {
                    if (p - w >= 0) acc += prob; // x = 1 on B at every level
                } else if (w > 0) {
                    const std::int64_t q = p - w;
                    if (q >= 0) {
                        const std::size_t idx =
                            std::distance(sq.begin(), std::find(sq.begin(), sq.end(), t));
                        acc += prob * x_hist[q][idx];
                    }
                }
            }
            rhs(i) = acc;
        }
        Eigen::VectorXd x = lu.solve(rhs);
        Vec xr(m);
        for (std::size_t i = 0; i < m; ++i) xr[i] = std::clamp(x(i), 0.0, 1.0);
        x_hist.push_back(xr);

        Vec full(n, 1.0);
        for (std::size_t i = 0; i < m; ++i) full[sq[i]] = xr[i];
        levels.push_back(full);
    }
    return levels;
}

} // namespace smrm
