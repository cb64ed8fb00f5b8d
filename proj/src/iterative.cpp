#include "smrm/iterative.hpp"

#include <chrono>
#include <cmath>

#include "smrm/convkernel.hpp"
#include "smrm/errors.hpp"

namespace smrm {

void IterationConfig::check() const {
    if (epsilon <= 0.0) throw InvalidParameter("IterationConfig: epsilon must be positive");
    if (epsilon >= divergence_threshold)
        throw InvalidParameter("IterationConfig: epsilon must stay below the divergence guard");
    if (max_iterations == 0) throw InvalidParameter("IterationConfig: max_iterations is zero");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Spectra of the widetilde-padded slices of a hypermatrix (length 2k-1 each).
// Zero-probability slices stay empty.
std::vector<CVec> widetilde_spectra(const Vec& probs, const Hypermatrix& g) {
    const std::size_t m = g.rows();
    const std::size_t k = g.len();
    const std::size_t len = 2 * k - 1;
    std::vector<CVec> spec(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double p = probs[i * m + j];
            if (p == 0.0) continue;
            CVec buf(len);
            auto slice = g.slice(i, j);
            for (std::size_t r = 0; r < k; ++r) buf[r] = p * slice[r];
            fft_forward(buf);
            spec[i * m + j] = std::move(buf);
        }
    return spec;
}

// One exact-method iteration: transform the current iterate, multiply by the
// precomputed spectra, inverse-transform, truncate to k and add the constant
// term. Values at or beyond k are discarded, which realizes the re-zeroing
// the convergence argument requires.
struct ExactIterator {
    std::size_t m, k, len;
    const std::vector<CVec>& spec;
    const Hypervector& constant;
    std::vector<CVec> f_spec; // scratch: spectra of the current iterate

    ExactIterator(std::size_t m, std::size_t k, const std::vector<CVec>& spec,
                  const Hypervector& constant)
        : m(m), k(k), len(2 * k - 1), spec(spec), constant(constant), f_spec(m) {}

    void step(const Hypervector& cur, Hypervector& next) {
        for (std::size_t t = 0; t < m; ++t) {
            CVec buf(len);
            auto row = cur.row(t);
            for (std::size_t r = 0; r < k; ++r) buf[r] = row[r];
            fft_forward(buf);
            f_spec[t] = std::move(buf);
        }
        CVec acc(len);
        for (std::size_t s = 0; s < m; ++s) {
            std::fill(acc.begin(), acc.end(), std::complex<double>(0.0));
            bool any = false;
            for (std::size_t t = 0; t < m; ++t) {
                const CVec& g = spec[s * m + t];
                if (g.empty()) continue;
                any = true;
                const CVec& f = f_spec[t];
                for (std::size_t tau = 0; tau < len; ++tau) acc[tau] += g[tau] * f[tau];
            }
            auto dst = next.row(s);
            auto hs = constant.row(s);
            if (any) {
                CVec inv = idft_complex(acc);
                for (std::size_t r = 0; r < k; ++r) dst[r] = inv[r].real() + hs[r];
            } else {
                for (std::size_t r = 0; r < k; ++r) dst[r] = hs[r];
            }
        }
    }
};

SolveReport iterate_exact(const Vec& probs, const Hypermatrix& g, const Hypervector& constant,
                          const IterationConfig& cfg) {
    cfg.check();
    const auto t0 = Clock::now();
    const std::size_t m = g.rows();
    const std::size_t k = g.len();
    const auto spec = widetilde_spectra(probs, g);
    ExactIterator it(m, k, spec, constant);

    Hypervector cur(k, m), next(k, m);
    SolveReport report;
    for (std::size_t n = 1; n <= cfg.max_iterations; ++n) {
        it.step(cur, next);
        const double diff = next.max_abs_diff(cur);
        if (cfg.record_history) report.history.push_back(diff);
        std::swap(cur, next);
        report.iterations = n;
        report.residual = diff;
        if (diff > cfg.divergence_threshold) {
            report.termination = Termination::Diverged;
            report.solution = std::move(cur);
            report.wall_time = seconds_since(t0);
            return report;
        }
        if (diff <= cfg.epsilon) {
            report.termination = Termination::Converged;
            report.solution = std::move(cur);
            report.wall_time = seconds_since(t0);
            return report;
        }
    }
    report.termination = Termination::MaxIterations;
    report.solution = std::move(cur);
    report.wall_time = seconds_since(t0);
    return report;
}

} // namespace

SolveReport solve_power_exact(const ReachabilitySystem& system, const IterationConfig& cfg) {
    return iterate_exact(system.a, system.g, system.h, cfg);
}

Hypervector bounded_density(const ReachabilitySystem& system, std::size_t n) {
    const std::size_t m = system.size();
    const std::size_t k = system.k;
    Hypervector cur(k, m), next(k, m);
    if (n == 0) return cur;
    const auto spec = widetilde_spectra(system.a, system.g);
    ExactIterator it(m, k, spec, system.h);
    for (std::size_t i = 0; i < n; ++i) {
        it.step(cur, next);
        std::swap(cur, next);
    }
    return cur;
}

SolveReport solve_power_approx(const ReachabilitySystem& system, const IterationConfig& cfg,
                               std::size_t pad_m) {
    cfg.check();
    const auto t0 = Clock::now();
    const std::size_t m = system.size();
    const std::size_t k = system.k;
    const std::size_t len = pad_m + k;

    std::vector<CVec> g_spec(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double p = system.prob(i, j);
            if (p == 0.0) continue;
            CVec buf(len);
            auto slice = system.g.slice(i, j);
            for (std::size_t r = 0; r < k; ++r) buf[r] = p * slice[r];
            fft_forward(buf);
            g_spec[i * m + j] = std::move(buf);
        }
    std::vector<CVec> eta(m);
    for (std::size_t s = 0; s < m; ++s) {
        CVec buf(len);
        auto hs = system.h.row(s);
        for (std::size_t r = 0; r < k; ++r) buf[r] = hs[r];
        fft_forward(buf);
        eta[s] = std::move(buf);
    }

    std::vector<CVec> cur(m, CVec(len)), next(m, CVec(len));
    SolveReport report;
    for (std::size_t n = 1; n <= cfg.max_iterations; ++n) {
        double diff_re = 0.0, diff_im = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            CVec& dst = next[s];
            dst = eta[s];
            for (std::size_t t = 0; t < m; ++t) {
                const CVec& g = g_spec[s * m + t];
                if (g.empty()) continue;
                const CVec& f = cur[t];
                for (std::size_t tau = 0; tau < len; ++tau) dst[tau] += g[tau] * f[tau];
            }
            for (std::size_t tau = 0; tau < len; ++tau) {
                diff_re = std::max(diff_re, std::abs(dst[tau].real() - cur[s][tau].real()));
                diff_im = std::max(diff_im, std::abs(dst[tau].imag() - cur[s][tau].imag()));
            }
        }
        std::swap(cur, next);
        const double diff = std::max(diff_re, diff_im);
        if (cfg.record_history) report.history.push_back(diff);
        report.iterations = n;
        report.residual = diff;
        if (diff > cfg.divergence_threshold) {
            report.termination = Termination::Diverged;
            break;
        }
        if (diff_re <= cfg.epsilon && diff_im <= cfg.epsilon) {
            report.termination = Termination::Converged;
            break;
        }
        if (n == cfg.max_iterations) report.termination = Termination::MaxIterations;
    }

    report.solution = Hypervector(k, m);
    for (std::size_t s = 0; s < m; ++s) {
        CVec inv = idft_complex(cur[s]);
        Vec row(k);
        for (std::size_t r = 0; r < k; ++r) row[r] = inv[r].real();
        report.solution.set_row(s, row);
    }
    report.wall_time = seconds_since(t0);
    return report;
}

namespace {

// H and kappa for the Jacobi/Gauss-Seidel splitting. One deconvolution per
// row: deconv(a, b) = conv(a, deconv(delta, b)).
void jacobi_terms(const ReachabilitySystem& system, Hypermatrix& h_mat, Hypervector& kappa) {
    const std::size_t m = system.size();
    const std::size_t k = system.k;
    h_mat = Hypermatrix(k, m, m);
    kappa = Hypervector(k, m);
    for (std::size_t s = 0; s < m; ++s) {
        Vec divisor = delta_vec(k);
        const double p_ss = system.prob(s, s);
        if (p_ss > 0.0) {
            auto g = system.g.slice(s, s);
            for (std::size_t r = 0; r < k; ++r) divisor[r] -= p_ss * g[r];
        }
        if (std::abs(divisor[0]) < 1e-300)
            throw NotFullDeconvolutor("jacobi: diagonal divisor vanishes at zero");
        const Vec inv = deconv_k(delta_vec(k), divisor, k);
        for (std::size_t t = 0; t < m; ++t) {
            if (t == s) continue;
            const double p = system.prob(s, t);
            if (p == 0.0) continue;
            Vec pg = system.g.slice_vec(s, t);
            for (double& v : pg) v *= p;
            h_mat.set_slice(s, t, conv_k(pg, inv, k));
        }
        kappa.set_row(s, conv_k(system.h.row_vec(s), inv, k));
    }
}

} // namespace

SolveReport solve_jacobi(const ReachabilitySystem& system, const IterationConfig& cfg) {
    Hypermatrix h_mat;
    Hypervector kappa;
    const auto t0 = Clock::now();
    jacobi_terms(system, h_mat, kappa);
    Vec ones(system.size() * system.size(), 1.0);
    SolveReport report = iterate_exact(ones, h_mat, kappa, cfg);
    report.wall_time = seconds_since(t0);
    return report;
}

SolveReport solve_gauss_seidel(const ReachabilitySystem& system, const IterationConfig& cfg) {
    cfg.check();
    const auto t0 = Clock::now();
    const std::size_t m = system.size();
    const std::size_t k = system.k;
    const std::size_t len = 2 * k - 1;

    Hypermatrix h_mat;
    Hypervector kappa;
    jacobi_terms(system, h_mat, kappa);
    Vec ones(m * m, 1.0);
    const auto spec = widetilde_spectra(ones, h_mat);

    Hypervector cur(k, m);
    std::vector<CVec> f_spec(m, CVec(len)); // spectra of rows, refreshed as rows update
    auto refresh = [&](std::size_t t) {
        CVec buf(len);
        auto row = cur.row(t);
        for (std::size_t r = 0; r < k; ++r) buf[r] = row[r];
        fft_forward(buf);
        f_spec[t] = std::move(buf);
    };
    for (std::size_t t = 0; t < m; ++t) refresh(t);

    SolveReport report;
    CVec acc(len);
    for (std::size_t n = 1; n <= cfg.max_iterations; ++n) {
        double diff = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::fill(acc.begin(), acc.end(), std::complex<double>(0.0));
            bool any = false;
            for (std::size_t j = 0; j < m; ++j) {
                const CVec& g = spec[i * m + j];
                if (g.empty()) continue;
                any = true;
                const CVec& f = f_spec[j];
                for (std::size_t tau = 0; tau < len; ++tau) acc[tau] += g[tau] * f[tau];
            }
            auto dst = cur.row(i);
            auto ki = kappa.row(i);
            if (any) {
                CVec inv = idft_complex(acc);
                for (std::size_t r = 0; r < k; ++r) {
                    const double v = inv[r].real() + ki[r];
                    diff = std::max(diff, std::abs(v - dst[r]));
                    dst[r] = v;
                }
            } else {
                for (std::size_t r = 0; r < k; ++r) {
                    diff = std::max(diff, std::abs(ki[r] - dst[r]));
                    dst[r] = ki[r];
                }
            }
            refresh(i);
        }
        if (cfg.record_history) report.history.push_back(diff);
        report.iterations = n;
        report.residual = diff;
        if (diff > cfg.divergence_threshold) {
            report.termination = Termination::Diverged;
            break;
        }
        if (diff <= cfg.epsilon) {
            report.termination = Termination::Converged;
            break;
        }
        if (n == cfg.max_iterations) report.termination = Termination::MaxIterations;
    }
    report.solution = std::move(cur);
    report.wall_time = seconds_since(t0);
    return report;
}

} // namespace smrm
