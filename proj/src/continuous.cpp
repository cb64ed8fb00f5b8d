#include "smrm/continuous.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>

#include "smrm/convkernel.hpp"
#include "smrm/errors.hpp"

namespace smrm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_same_grid(const QuadratureGrid& a, const QuadratureGrid& b, const char* what) {
    if (!(a == b)) {
        std::ostringstream os;
        os << what << ": grid mismatch (" << a.n_points << " points on [0," << a.b << "] vs "
           << b.n_points << " points on [0," << b.b << "])";
        throw GridMismatch(os.str());
    }
}

} // namespace

QuadratureGrid::QuadratureGrid(double bound, std::size_t n) : b(bound), n_points(n) {
    if (bound <= 0.0) throw InvalidParameter("QuadratureGrid: interval bound must be positive");
    if (n < 2) throw InvalidParameter("QuadratureGrid: at least two points required");
}

bool QuadratureGrid::operator==(const QuadratureGrid& o) const {
    return n_points == o.n_points && std::abs(b - o.b) <= 1e-12 * std::max(1.0, std::abs(b));
}

SampledDensity::SampledDensity(QuadratureGrid g, Vec v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_points)
        throw InvalidParameter("SampledDensity: sample count differs from grid size");
}

Vec density_of(const RewardDist& dist, const QuadratureGrid& grid) {
    check_parameters(dist);
    if (is_lattice_family(dist))
        throw InvalidParameter("density_of: lattice family has point masses; "
                               "not usable on a continuous grid");
    const std::size_t n = grid.n_points;
    Vec out(n, 0.0);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, UniformMixture>) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double x = grid.point(j);
                    double v = 0.0;
                    for (const auto& c : d.components)
                        if (x >= c.lo && x < c.hi) v += c.weight / (c.hi - c.lo);
                    out[j] = v;
                }
            } else if constexpr (std::is_same_v<T, Exponential>) {
                for (std::size_t j = 0; j < n; ++j)
                    out[j] = d.rate * std::exp(-d.rate * grid.point(j));
            } else if constexpr (std::is_same_v<T, WeibullCont>) {
                // x = 0 with shape < 1 is an integrable pole; the sample is
                // forced to zero so quadrature stays finite
                for (std::size_t j = 0; j < n; ++j) {
                    const double x = grid.point(j);
                    if (x <= 0.0) {
                        out[j] = d.shape == 1.0 ? 1.0 / d.scale : 0.0;
                    } else {
                        out[j] = d.shape / d.scale * std::pow(x, d.shape - 1.0) *
                                 std::exp(-std::pow(x, d.shape) / d.scale);
                    }
                }
            }
        },
        dist);
    return out;
}

namespace {

// h * conv_N of samples, with one operand's zeroth sample dropped.
Vec scaled_conv(const QuadratureGrid& grid, const Vec& a, const Vec& b, bool zero_a,
                bool zero_b) {
    Vec av = a, bv = b;
    if (zero_a && !av.empty()) av[0] = 0.0;
    if (zero_b && !bv.empty()) bv[0] = 0.0;
    Vec out = conv_k(av, bv, grid.n_points);
    const double scale = grid.step();
    for (double& v : out) v *= scale;
    return out;
}

} // namespace

SampledDensity conv_riemann_right(const SampledDensity& f, const SampledDensity& g) {
    require_same_grid(f.grid, g.grid, "conv_riemann_right");
    return {f.grid, scaled_conv(f.grid, f.values, g.values, false, true)};
}

SampledDensity conv_riemann_left(const SampledDensity& f, const SampledDensity& g) {
    require_same_grid(f.grid, g.grid, "conv_riemann_left");
    return {f.grid, scaled_conv(f.grid, f.values, g.values, true, false)};
}

SampledDensity conv_trapezoid(const SampledDensity& f, const SampledDensity& g) {
    require_same_grid(f.grid, g.grid, "conv_trapezoid");
    Vec right = scaled_conv(f.grid, f.values, g.values, false, true);
    const Vec left = scaled_conv(f.grid, f.values, g.values, true, false);
    for (std::size_t j = 0; j < right.size(); ++j) right[j] = 0.5 * (right[j] + left[j]);
    return {f.grid, std::move(right)};
}

SampledDensity conv_rule(QuadRule rule, const SampledDensity& f, const SampledDensity& g) {
    switch (rule) {
        case QuadRule::RiemannLeft: return conv_riemann_left(f, g);
        case QuadRule::RiemannRight: return conv_riemann_right(f, g);
        case QuadRule::Trapezoid: return conv_trapezoid(f, g);
    }
    throw InvalidParameter("conv_rule: unknown rule");
}

RombergLevel::RombergLevel(std::size_t level) : l(level) {
    if (level < 1 || level > 6) throw InvalidParameter("RombergLevel: level must be in 1..6");
}

namespace {

// Keep every second sample: 2N-1 points down to N on the same interval.
SampledDensity downsample(const SampledDensity& fine) {
    const std::size_t n_coarse = (fine.grid.n_points + 1) / 2;
    Vec coarse(n_coarse);
    for (std::size_t j = 0; j < n_coarse; ++j) coarse[j] = fine.values[2 * j];
    return {QuadratureGrid(fine.grid.b, n_coarse), std::move(coarse)};
}

SampledDensity romberg_combine(std::vector<SampledDensity> rows, std::size_t level) {
    for (std::size_t o = 2; o <= level; ++o) {
        const double w = std::pow(4.0, static_cast<double>(o - 1));
        std::vector<SampledDensity> next;
        for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
            SampledDensity fine = downsample(rows[j + 1]);
            require_same_grid(fine.grid, rows[j].grid, "conv_romberg");
            Vec combined(fine.values.size());
            for (std::size_t i = 0; i < combined.size(); ++i)
                combined[i] = (w * fine.values[i] - rows[j].values[i]) / (w - 1.0);
            next.push_back({rows[j].grid, std::move(combined)});
        }
        rows = std::move(next);
    }
    return rows.front();
}

} // namespace

SampledDensity conv_romberg(const std::vector<SampledDensity>& trapezoid_hierarchy,
                            RombergLevel level) {
    if (trapezoid_hierarchy.size() < level.l)
        throw InvalidParameter("conv_romberg: hierarchy is missing levels");
    for (std::size_t j = 0; j + 1 < level.l; ++j) {
        if (trapezoid_hierarchy[j + 1].grid.n_points != 2 * trapezoid_hierarchy[j].grid.n_points - 1)
            throw InvalidParameter("conv_romberg: grids are not nested by refinement");
    }
    std::vector<SampledDensity> rows(trapezoid_hierarchy.begin(),
                                     trapezoid_hierarchy.begin() + level.l);
    return romberg_combine(std::move(rows), level.l);
}

namespace {

// Geometric series for v1 (/) (delta - q * f_y) without the mixture check;
// v1 carries its own weight. Each application keeps q*f_y on the kernel
// side of the rule so the composition matches the power operator.
Vec dvc_raw(const QuadratureGrid& grid, const Vec& v1, double q, const Vec& f_y, std::size_t m,
            QuadRule rule) {
    Vec result = v1;
    if (q == 0.0 || m == 0) return result;
    Vec qf(f_y.size());
    for (std::size_t i = 0; i < f_y.size(); ++i) qf[i] = q * f_y[i];
    const SampledDensity qfd{QuadratureGrid(grid.b, grid.n_points), qf};
    SampledDensity term{qfd.grid, v1};
    for (std::size_t n = 1; n <= m; ++n) {
        term = conv_rule(rule, qfd, term);
        for (std::size_t i = 0; i < result.size(); ++i) result[i] += term.values[i];
    }
    return result;
}

} // namespace

SampledDensity dvc(const SampledDensity& f_x, double p, double q, const SampledDensity& f_y,
                   std::size_t m, QuadRule rule) {
    require_same_grid(f_x.grid, f_y.grid, "dvc");
    if (p < 0.0 || q < 0.0 || p + q > 1.0 + 1e-9)
        throw InvalidMixture("dvc: probabilities must satisfy 0 <= p+q <= 1");
    if (std::abs(q - 1.0) < 1e-15) throw InvalidMixture("dvc: q = 1 is excluded");
    Vec v1(f_x.values.size());
    for (std::size_t i = 0; i < v1.size(); ++i) v1[i] = p * f_x.values[i];
    return {f_x.grid, dvc_raw(f_x.grid, v1, q, f_y.values, m, rule)};
}

// ---------------------------------------------------------------------------
// Continuous system assembly
// ---------------------------------------------------------------------------

namespace {

std::vector<bool> reaches(const Smrm& model, const std::set<std::size_t>& target) {
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
        for (std::size_t s = 0; s < n; ++s)
            if (!reach[s] && model.prob(s, t) > 0.0 && !target.count(s)) {
                reach[s] = true;
                queue.push_back(s);
            }
    }
    return reach;
}

} // namespace

ContinuousSystem preprocess_continuous(const Smrm& model, const QuadratureGrid& grid) {
    if (model.target_set.empty()) throw EmptyTarget("preprocess_continuous: target set is empty");
    const auto reach = reaches(model, model.target_set);
    std::vector<std::size_t> sq;
    for (std::size_t s = 0; s < model.num_states(); ++s)
        if (reach[s] && !model.target_set.count(s)) sq.push_back(s);
    if (sq.empty())
        throw NoReachableState("preprocess_continuous: no state outside B reaches B");

    const std::size_t m = sq.size();
    ContinuousSystem sys;
    sys.grid = grid;
    sys.s_index = sq;
    for (std::size_t s : sq) sys.s_question.push_back(model.states[s]);
    sys.a.assign(m * m, 0.0);
    sys.g_dists.assign(m * m, DiracZero{});
    sys.h_parts.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double p = model.prob(sq[i], sq[j]);
            sys.a[i * m + j] = p;
            if (p > 0.0) {
                const RewardDist& dist = model.rewards.at({sq[i], sq[j]});
                if (is_lattice_family(dist))
                    throw InvalidParameter("preprocess_continuous: reward with point masses on "
                                           "a positive-probability transition");
                sys.g_dists[i * m + j] = dist;
            }
        }
        for (std::size_t b : model.target_set) {
            const double p = model.prob(sq[i], b);
            if (p <= 0.0) continue;
            const RewardDist& dist = model.rewards.at({sq[i], b});
            if (is_lattice_family(dist))
                throw InvalidParameter("preprocess_continuous: reward with point masses on "
                                       "a positive-probability transition");
            sys.h_parts[i].push_back({p, dist});
        }
    }
    const Vec probs = reach_probabilities(model, model.target_set);
    sys.reach_prob_one = true;
    for (std::size_t s : sq)
        if (probs[s] < 1.0 - 1e-9) sys.reach_prob_one = false;
    return sys;
}

Hypermatrix ContinuousSystem::sample_g(const QuadratureGrid& g) const {
    const std::size_t m = size();
    Hypermatrix out(g.n_points, m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (a[i * m + j] > 0.0) out.set_slice(i, j, density_of(g_dists[i * m + j], g));
    return out;
}

Hypervector ContinuousSystem::sample_h(const QuadratureGrid& g) const {
    const std::size_t m = size();
    Hypervector out(g.n_points, m);
    for (std::size_t s = 0; s < m; ++s) {
        Vec row(g.n_points, 0.0);
        for (const auto& [p, dist] : h_parts[s]) {
            const Vec pdf = density_of(dist, g);
            for (std::size_t j = 0; j < g.n_points; ++j) row[j] += p * pdf[j];
        }
        out.set_row(s, row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Continuous solvers
// ---------------------------------------------------------------------------

namespace {

// Power-type iteration with quadrature convolution. The kernel hypermatrix
// carries its probabilities already; `rule` decides which zeroed variants
// take part. Works on arbitrary (kernel, constant) pairs so the Jacobi
// solver reuses it.
SolveReport iterate_quadrature(const QuadratureGrid& grid, const Hypermatrix& kernel,
                               const Hypervector& constant, const IterationConfig& cfg,
                               QuadRule rule) {
    cfg.check();
    const auto t0 = Clock::now();
    const std::size_t m = kernel.rows();
    const std::size_t n = grid.n_points;
    const std::size_t len = 2 * n - 1;
    const double step = grid.step();

    const bool use_plain = rule != QuadRule::RiemannLeft;   // kernel as sampled
    const bool use_zeroed = rule != QuadRule::RiemannRight; // kernel with sample 0 dropped
    const double weight = rule == QuadRule::Trapezoid ? 0.5 * step : step;

    std::vector<CVec> spec_plain(m * m), spec_zeroed(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            auto slice = kernel.slice(i, j);
            bool all_zero = true;
            for (double v : slice)
                if (v != 0.0) {
                    all_zero = false;
                    break;
                }
            if (all_zero) continue;
            if (use_plain) {
                CVec buf(len);
                for (std::size_t r = 0; r < n; ++r) buf[r] = slice[r];
                fft_forward(buf);
                spec_plain[i * m + j] = std::move(buf);
            }
            if (use_zeroed) {
                CVec buf(len);
                for (std::size_t r = 1; r < n; ++r) buf[r] = slice[r];
                fft_forward(buf);
                spec_zeroed[i * m + j] = std::move(buf);
            }
        }

    Hypervector cur(n, m), next(n, m);
    std::vector<CVec> f_plain(m), f_zeroed(m);
    SolveReport report;
    CVec acc(len);
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        for (std::size_t t = 0; t < m; ++t) {
            auto row = cur.row(t);
            if (use_plain) { // pairs with the zeroed kernel (left rule)
                CVec buf(len);
                for (std::size_t r = 1; r < n; ++r) buf[r] = row[r];
                fft_forward(buf);
                f_zeroed[t] = std::move(buf);
            }
            if (use_zeroed) {
                CVec buf(len);
                for (std::size_t r = 0; r < n; ++r) buf[r] = row[r];
                fft_forward(buf);
                f_plain[t] = std::move(buf);
            }
        }
        for (std::size_t s = 0; s < m; ++s) {
            std::fill(acc.begin(), acc.end(), std::complex<double>(0.0));
            bool any = false;
            for (std::size_t t = 0; t < m; ++t) {
                // right rule: plain kernel x zeroed iterate; left: the converse
                if (use_plain && !spec_plain[s * m + t].empty()) {
                    any = true;
                    const CVec& gs = spec_plain[s * m + t];
                    const CVec& fs = f_zeroed[t];
                    for (std::size_t tau = 0; tau < len; ++tau) acc[tau] += gs[tau] * fs[tau];
                }
                if (use_zeroed && !spec_zeroed[s * m + t].empty()) {
                    any = true;
                    const CVec& gs = spec_zeroed[s * m + t];
                    const CVec& fs = f_plain[t];
                    for (std::size_t tau = 0; tau < len; ++tau) acc[tau] += gs[tau] * fs[tau];
                }
            }
            auto dst = next.row(s);
            auto hs = constant.row(s);
            if (any) {
                CVec inv = idft_complex(acc);
                for (std::size_t r = 0; r < n; ++r) dst[r] = weight * inv[r].real() + hs[r];
            } else {
                for (std::size_t r = 0; r < n; ++r) dst[r] = hs[r];
            }
        }
        const double diff = next.max_abs_diff(cur);
        if (cfg.record_history) report.history.push_back(diff);
        std::swap(cur, next);
        report.iterations = it;
        report.residual = diff;
        if (diff > cfg.divergence_threshold) {
            report.termination = Termination::Diverged;
            break;
        }
        if (diff <= cfg.epsilon) {
            report.termination = Termination::Converged;
            break;
        }
        if (it == cfg.max_iterations) report.termination = Termination::MaxIterations;
    }
    report.solution = std::move(cur);
    report.wall_time = seconds_since(t0);
    return report;
}

Hypermatrix scaled_kernel(const ContinuousSystem& system, const QuadratureGrid& grid) {
    const std::size_t m = system.size();
    Hypermatrix g = system.sample_g(grid);
    Hypermatrix kernel(grid.n_points, m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double p = system.prob(i, j);
            if (p == 0.0) continue;
            auto src = g.slice(i, j);
            auto dst = kernel.slice(i, j);
            for (std::size_t r = 0; r < grid.n_points; ++r) dst[r] = p * src[r];
        }
    return kernel;
}

} // namespace

SolveReport solve_power_continuous(const ContinuousSystem& system, const IterationConfig& cfg,
                                   QuadRule rule) {
    return iterate_quadrature(system.grid, scaled_kernel(system, system.grid),
                              system.sample_h(system.grid), cfg, rule);
}

SolveReport solve_power_romberg(const ContinuousSystem& system, const IterationConfig& cfg,
                                RombergLevel level) {
    const auto t0 = Clock::now();
    std::vector<SolveReport> runs;
    QuadratureGrid grid = system.grid;
    for (std::size_t j = 0; j < level.l; ++j) {
        runs.push_back(iterate_quadrature(grid, scaled_kernel(system, grid),
                                          system.sample_h(grid), cfg, QuadRule::Trapezoid));
        grid = grid.refined();
    }

    SolveReport report;
    report.solution = Hypervector(system.grid.n_points, system.size());
    for (std::size_t s = 0; s < system.size(); ++s) {
        std::vector<SampledDensity> rows;
        QuadratureGrid g = system.grid;
        for (std::size_t j = 0; j < level.l; ++j) {
            rows.push_back({g, runs[j].solution.row_vec(s)});
            g = g.refined();
        }
        report.solution.set_row(s, romberg_combine(std::move(rows), level.l).values);
    }
    report.termination = Termination::Converged;
    for (const auto& run : runs) {
        report.iterations += run.iterations;
        report.residual = std::max(report.residual, run.residual);
        if (run.termination != Termination::Converged) report.termination = run.termination;
    }
    report.wall_time = seconds_since(t0);
    return report;
}

SolveReport solve_jacobi_continuous(const ContinuousSystem& system, const IterationConfig& cfg,
                                    QuadRule rule, std::size_t m_terms) {
    const auto t0 = Clock::now();
    const std::size_t m = system.size();
    const QuadratureGrid& grid = system.grid;
    const Hypermatrix g = system.sample_g(grid);
    const Hypervector h = system.sample_h(grid);

    Hypermatrix kernel(grid.n_points, m, m);
    Hypervector kappa(grid.n_points, m);
    for (std::size_t s = 0; s < m; ++s) {
        const double q = system.prob(s, s);
        const Vec g_ss = q > 0.0 ? g.slice_vec(s, s) : Vec(grid.n_points, 0.0);
        for (std::size_t t = 0; t < m; ++t) {
            if (t == s) continue;
            const double p = system.prob(s, t);
            if (p == 0.0) continue;
            Vec v1 = g.slice_vec(s, t);
            for (double& v : v1) v *= p;
            kernel.set_slice(s, t, dvc_raw(grid, v1, q, g_ss, m_terms, rule));
        }
        kappa.set_row(s, dvc_raw(grid, h.row_vec(s), q, g_ss, m_terms, rule));
    }

    SolveReport report = iterate_quadrature(grid, kernel, kappa, cfg, rule);
    report.wall_time = seconds_since(t0);
    return report;
}

} // namespace smrm
