#include "smrm/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "smrm/errors.hpp"

namespace smrm {

// splitmix64 step; stable across platforms unlike the standard library's
// distribution adaptors
std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t Rng::next_index(std::size_t n) {
    return n == 0 ? 0 : static_cast<std::size_t>(next_double() * static_cast<double>(n)) % n;
}

Rng Rng::split(std::uint64_t stream) const {
    Rng child(state_ ^ (0xd1342543de82ef95ULL * (stream + 1)));
    child.next_u64();
    return child;
}

namespace {

using Matrix = std::vector<Vec>;

Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, Vec(cols, 0.0)); }

// sample `count` distinct indices out of 0..n-1 (partial Fisher-Yates)
std::vector<std::size_t> choice_without_replacement(std::size_t n, std::size_t count, Rng& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    count = std::min(count, n);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.next_index(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
    return choice_without_replacement(n, n, rng);
}

void normalize_columns(Matrix& m) {
    if (m.empty()) return;
    const std::size_t rows = m.size(), cols = m[0].size();
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < rows; ++r) sum += m[r][c];
        if (sum == 0.0) continue;
        for (std::size_t r = 0; r < rows; ++r) m[r][c] /= sum;
    }
}

Matrix transpose(const Matrix& m) {
    const std::size_t rows = m.size(), cols = m[0].size();
    Matrix t = zeros(cols, rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) t[c][r] = m[r][c];
    return t;
}

GeneratedChain split_last_column(Matrix p) {
    GeneratedChain out;
    const std::size_t rows = p.size(), cols = p[0].size();
    out.b.resize(rows);
    out.a = zeros(rows, cols - 1);
    for (std::size_t r = 0; r < rows; ++r) {
        out.b[r] = p[r][cols - 1];
        for (std::size_t c = 0; c + 1 < cols; ++c) out.a[r][c] = p[r][c];
    }
    out.p = std::move(p);
    return out;
}

} // namespace

GeneratedChain gen_mc_uniform(std::size_t num_states, Rng& rng) {
    // (n+1) x n uniform samples plus 0.01, column-normalized, transposed
    const std::size_t n = num_states;
    Matrix m = zeros(n + 1, n);
    for (std::size_t r = 0; r < n + 1; ++r)
        for (std::size_t c = 0; c < n; ++c) m[r][c] = rng.next_double() + 0.01;
    normalize_columns(m);
    return split_last_column(transpose(m));
}

GeneratedChain gen_mc_block(std::size_t num_states, Rng& rng, std::size_t num_pass,
                            double block_scale) {
    const std::size_t n = num_states;
    Matrix m = zeros(n, n + 1);

    const std::size_t reach_count =
        static_cast<std::size_t>(static_cast<double>(n) * rng.next_double());
    const auto reach_idxs = choice_without_replacement(n, reach_count, rng);
    for (std::size_t idx : reach_idxs) m[idx][n] = rng.next_double();

    for (std::size_t pass = 0; pass < num_pass; ++pass) {
        const std::size_t block_size = static_cast<std::size_t>(
            rng.next_double() * static_cast<double>(n) / (2.0 * block_scale));
        std::size_t start[2];
        for (int d = 0; d < 2; ++d) {
            const auto raw = static_cast<std::int64_t>(rng.next_double() * static_cast<double>(n));
            start[d] = static_cast<std::size_t>(
                std::max<std::int64_t>(raw - static_cast<std::int64_t>(block_size), 0));
        }
        for (std::size_t r = start[0]; r < std::min(n, start[0] + 2 * block_size); ++r)
            for (std::size_t c = start[1]; c < std::min(n + 1, start[1] + 2 * block_size); ++c)
                m[r][c] += 1.0;
    }

    // the recipe normalizes along columns and never transposes
    normalize_columns(m);
    return split_last_column(std::move(m));
}

GeneratedChain gen_mc_npass(std::size_t num_states, Rng& rng, std::size_t num_pass) {
    const std::size_t n = num_states;
    Matrix m = zeros(n, n + 1);

    const std::size_t reach_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(static_cast<double>(n) * rng.next_double()));
    auto reach_idxs = choice_without_replacement(n, reach_count, rng);
    for (std::size_t idx : reach_idxs) m[idx][n] = rng.next_double();

    for (std::size_t pass = 0; pass < num_pass; ++pass) {
        const auto sel_states = permutation(n, rng);
        std::vector<std::size_t> choices(n);
        for (std::size_t i = 0; i < n; ++i)
            choices[i] = reach_idxs[rng.next_index(reach_idxs.size())];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = sel_states[i];
            const double row_sum = std::accumulate(m[row].begin(), m[row].end(), 0.0);
            const double headroom = std::max(0.0, 1.0 - row_sum);
            m[row][choices[i]] += rng.next_double() * headroom;
        }
        reach_idxs.assign(sel_states.begin(), sel_states.end());
    }
    return split_last_column(std::move(m));
}

GeneratedChain gen_mc_sparse(std::size_t num_states, Rng& rng, double density) {
    const std::size_t n = num_states;
    Matrix m = zeros(n + 1, n);
    // sparse uniform fill: each entry occupied independently with the given
    // density, mirroring a sparse random matrix materialized densely
    for (std::size_t r = 0; r < n + 1; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (rng.next_double() < density) m[r][c] = rng.next_double();

    const std::size_t reach_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(static_cast<double>(n) * rng.next_double()));
    const auto reach_idxs = choice_without_replacement(n, reach_count, rng);
    // the recipe writes the goal-reach entries into the last column of the
    // pre-transpose matrix, so some samples end up with no state reaching B
    for (std::size_t idx : reach_idxs) m[idx][n - 1] = rng.next_double();

    normalize_columns(m);
    return split_last_column(transpose(m));
}

ReachabilitySystem system_from_chain(const GeneratedChain& chain, std::size_t k,
                                     const std::string& pmf_family, double param_lo,
                                     double param_hi, Rng& rng) {
    const std::size_t m = chain.a.size();
    ReachabilitySystem sys;
    sys.k = k;
    sys.a.assign(m * m, 0.0);
    sys.g = Hypermatrix(k, m, m);
    sys.h = Hypervector(k, m);
    sys.h_prob_weight.assign(m, 0.0);
    sys.g_tail_mass.assign(m * m, 0.0);
    sys.h_tail_mass.assign(m, 0.0);
    sys.reach_prob_one = true;
    for (std::size_t s = 0; s < m; ++s) sys.s_question.push_back("s" + std::to_string(s));
    sys.s_index.resize(m);
    std::iota(sys.s_index.begin(), sys.s_index.end(), 0);

    auto draw_dist = [&]() -> RewardDist {
        const double param = param_lo + rng.next_double() * (param_hi - param_lo);
        if (pmf_family == "geometric") return Geometric{param};
        if (pmf_family == "binomial") return Binomial{k, param};
        if (pmf_family == "discrete-weibull") return DiscreteWeibull{param, 0.5};
        if (pmf_family == "discrete-gumbel") return DiscreteGumbel{param, 5.0};
        throw InvalidParameter("system_from_chain: unknown pmf family " + pmf_family);
    };

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double p = chain.a[i][j];
            sys.a[i * m + j] = p;
            if (p > 0.0) {
                double tail = 0.0;
                sys.g.set_slice(i, j, density_of(draw_dist(), k, &tail));
                sys.g_tail_mass[i * m + j] = tail;
            }
        }
        if (chain.b[i] > 0.0) {
            double tail = 0.0;
            Vec pmf = density_of(draw_dist(), k, &tail);
            for (double& v : pmf) v *= chain.b[i];
            sys.h.set_row(i, pmf);
            sys.h_prob_weight[i] = chain.b[i];
            sys.h_tail_mass[i] = chain.b[i] * tail;
        }
    }
    return sys;
}

namespace {

RewardDist draw_family(const std::string& family, double lo, double hi, std::size_t k, Rng& rng) {
    const double param = lo + rng.next_double() * (hi - lo);
    if (family == "geometric") return Geometric{param};
    if (family == "binomial") return Binomial{k, param};
    if (family == "discrete-weibull") return DiscreteWeibull{param, 0.5};
    if (family == "discrete-gumbel") return DiscreteGumbel{param, 5.0};
    throw InvalidParameter("unknown pmf family " + family);
}

} // namespace

Smrm smrm_from_chain(const GeneratedChain& chain, const std::string& pmf_family, double param_lo,
                     double param_hi, Rng& rng) {
    const std::size_t m = chain.a.size();
    Smrm model;
    for (std::size_t s = 0; s < m; ++s) model.states.push_back("s" + std::to_string(s));
    model.states.push_back("goal");
    model.transition_probs.assign(m + 1, Vec(m + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            model.transition_probs[i][j] = chain.a[i][j];
            if (chain.a[i][j] > 0.0)
                model.rewards[{i, j}] = draw_family(pmf_family, param_lo, param_hi, 1024, rng);
        }
        model.transition_probs[i][m] = chain.b[i];
        if (chain.b[i] > 0.0)
            model.rewards[{i, m}] = draw_family(pmf_family, param_lo, param_hi, 1024, rng);
    }
    model.transition_probs[m][m] = 1.0;
    model.rewards[{m, m}] = DiracZero{};
    model.target_set = {m};
    return model;
}

void write_traces_csv(std::ostream& out, const std::vector<Trace>& traces,
                      const std::vector<std::string>& state_names) {
    out << "trace,terminated_by,cumulated_reward,path\n";
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& t = traces[i];
        out << i << ','
            << (t.terminated_by == Trace::End::ReachedGoal ? "reached-goal" : "reward-bound")
            << ',' << t.cumulated_reward << ",\"";
        for (std::size_t j = 0; j < t.path.size(); ++j)
            out << (j ? " " : "") << state_names[t.path[j]];
        out << "\"\n";
    }
}

double sample_reward(const RewardDist& dist, Rng& rng) {
    if (std::holds_alternative<DiracZero>(dist)) return 0.0;
    if (const auto* e = std::get_if<Exponential>(&dist))
        return -std::log1p(-rng.next_double()) / e->rate;
    if (const auto* w = std::get_if<WeibullCont>(&dist))
        return std::pow(-w->scale * std::log1p(-rng.next_double()), 1.0 / w->shape);
    if (const auto* mix = std::get_if<UniformMixture>(&dist)) {
        double u = rng.next_double();
        for (const auto& c : mix->components) {
            if (u < c.weight) return c.lo + rng.next_double() * (c.hi - c.lo);
            u -= c.weight;
        }
        const auto& last = mix->components.back();
        return last.lo + rng.next_double() * (last.hi - last.lo);
    }

    // lattice families: categorical over the truncated pmf; draws landing in
    // the dropped tail are rejected and redrawn
    std::size_t len = 1024;
    Vec pmf;
    double tail = 1.0;
    for (;;) {
        pmf = density_of(dist, len, &tail);
        if (tail < 1e-12 || len >= (1u << 20)) break;
        len *= 2;
    }
    double total = 0.0;
    for (double v : pmf) total += v;
    // an explicit lattice may carry mass < 1 by itself; condition on it
    const double scale = std::holds_alternative<ExplicitLattice>(dist) ? total : 1.0;
    for (;;) {
        double u = rng.next_double() * scale;
        for (std::size_t t = 0; t < pmf.size(); ++t) {
            if (u < pmf[t]) return static_cast<double>(t);
            u -= pmf[t];
        }
        // tail bucket: redraw
    }
}

std::vector<Trace> sample_traces(const Smrm& model, std::size_t start, std::size_t count,
                                 double reward_bound, Rng& rng) {
    constexpr std::size_t kStepGuard = 10'000'000;
    std::vector<Trace> traces;
    traces.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Trace trace;
        std::size_t state = start;
        std::size_t steps = 0;
        while (!model.target_set.count(state)) {
            if (++steps > kStepGuard)
                throw NonterminatingModel("sample_traces: trace exceeded the step guard");
            double u = rng.next_double();
            std::size_t next = model.num_states() - 1;
            for (std::size_t t = 0; t < model.num_states(); ++t) {
                const double p = model.prob(state, t);
                if (u < p) {
                    next = t;
                    break;
                }
                u -= p;
            }
            trace.cumulated_reward += sample_reward(model.rewards.at({state, next}), rng);
            trace.path.push_back(next);
            state = next;
            if (trace.cumulated_reward >= reward_bound) {
                trace.terminated_by = Trace::End::RewardBound;
                break;
            }
        }
        traces.push_back(std::move(trace));
    }
    return traces;
}

Vec empirical_density(const std::vector<Trace>& traces, std::size_t k) {
    Vec density(k, 0.0);
    if (traces.empty()) return density;
    const double weight = 1.0 / static_cast<double>(traces.size());
    for (const auto& trace : traces) {
        if (trace.terminated_by != Trace::End::ReachedGoal) continue;
        const auto idx = static_cast<std::size_t>(std::llround(trace.cumulated_reward));
        if (idx < k) density[idx] += weight;
    }
    return density;
}

Vec empirical_density(const std::vector<Trace>& traces, const QuadratureGrid& grid) {
    Vec density(grid.n_points, 0.0);
    if (traces.empty()) return density;
    const double h = grid.step();
    const double weight = 1.0 / (static_cast<double>(traces.size()) * h);
    for (const auto& trace : traces) {
        if (trace.terminated_by != Trace::End::ReachedGoal) continue;
        const auto idx = static_cast<std::size_t>(std::floor(trace.cumulated_reward / h + 0.5));
        if (idx < grid.n_points) density[idx] += weight;
    }
    return density;
}

} // namespace smrm
