#include "smrm/direct.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "smrm/convkernel.hpp"
#include "smrm/errors.hpp"

namespace smrm {

namespace {

void sub_inplace(std::span<double> dst, const Vec& v) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= v[i];
}

} // namespace

Hypermatrix build_acal(const ReachabilitySystem& system) {
    const std::size_t m = system.size();
    const std::size_t k = system.k;
    Hypermatrix acal(k, m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            auto dst = acal.slice(i, j);
            auto g = system.g.slice(i, j);
            const double p = system.prob(i, j);
            for (std::size_t r = 0; r < k; ++r) dst[r] = -p * g[r];
            if (i == j) dst[0] += 1.0;
        }
    }
    return acal;
}

void gauss_reduce(Hypermatrix& acal, Hypervector& h) {
    const std::size_t m = acal.rows();
    const std::size_t k = acal.len();
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const Vec pivot = acal.slice_vec(j, j);
        if (std::abs(pivot[0]) < 1e-300) {
            std::ostringstream os;
            os << "gauss_reduce: pivot " << j << " has vanishing zeroth entry";
            throw NotFullDeconvolutor(os.str());
        }
        for (std::size_t i = j + 1; i < m; ++i) {
            const Vec sigma = deconv_k(acal.slice_vec(i, j), pivot, k);
            for (std::size_t l = j; l < m; ++l)
                sub_inplace(acal.slice(i, l), conv_k(acal.slice_vec(j, l), sigma, k));
            sub_inplace(h.row(i), conv_k(h.row_vec(j), sigma, k));
            // the eliminated entry is exactly zero by construction
            acal.set_slice(i, j, Vec(k, 0.0));
        }
    }
}

Hypervector back_substitute(const Hypermatrix& upper, const Hypervector& h) {
    const std::size_t m = upper.rows();
    const std::size_t k = upper.len();
    Hypervector f(k, m);
    for (std::size_t ii = m; ii-- > 0;) {
        Vec rhs = h.row_vec(ii);
        for (std::size_t j = ii + 1; j < m; ++j) {
            const Vec c = conv_k(upper.slice_vec(ii, j), f.row_vec(j), k);
            for (std::size_t r = 0; r < k; ++r) rhs[r] -= c[r];
        }
        const Vec pivot = upper.slice_vec(ii, ii);
        if (std::abs(pivot[0]) < 1e-300) {
            std::ostringstream os;
            os << "back_substitute: pivot " << ii << " has vanishing zeroth entry";
            throw NotFullDeconvolutor(os.str());
        }
        f.set_row(ii, deconv_k(rhs, pivot, k));
    }
    return f;
}

double fixed_point_residual(const ReachabilitySystem& system, const Hypervector& f) {
    const std::size_t m = system.size();
    const std::size_t k = system.k;
    double res = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        Vec rhs = system.h.row_vec(s);
        for (std::size_t t = 0; t < m; ++t) {
            const double p = system.prob(s, t);
            if (p == 0.0) continue;
            Vec pg = system.g.slice_vec(s, t);
            for (double& v : pg) v *= p;
            const Vec c = conv_k(pg, f.row_vec(t), k);
            for (std::size_t r = 0; r < k; ++r) rhs[r] += c[r];
        }
        auto fs = f.row(s);
        for (std::size_t r = 0; r < k; ++r) res = std::max(res, std::abs(fs[r] - rhs[r]));
    }
    return res;
}

SolveReport solve_ge(const ReachabilitySystem& system, const DirectOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    Hypermatrix acal = build_acal(system);
    Hypervector h = system.h;
    gauss_reduce(acal, h);
    SolveReport report;
    report.solution = back_substitute(acal, h);
    report.termination = Termination::Direct;
    report.iterations = 0;
    report.residual = fixed_point_residual(system, report.solution);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts.residual_check && report.residual > opts.residual_tol) {
        std::ostringstream os;
        os << "solve_ge: residual " << report.residual << " exceeds " << opts.residual_tol;
        throw ResidualCheckFailed(os.str());
    }
    return report;
}

SolveReport solve_lu_approx(const ReachabilitySystem& system, std::size_t pad_n) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t m = system.size();
    const std::size_t k = system.k;
    const std::size_t len = pad_n + k;

    // spectra of the padded reward pmfs and of h
    std::vector<CVec> c_spec(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (system.prob(i, j) == 0.0) continue;
            CVec buf(len);
            auto g = system.g.slice(i, j);
            for (std::size_t r = 0; r < k; ++r) buf[r] = g[r];
            fft_forward(buf);
            c_spec[i * m + j] = std::move(buf);
        }
    std::vector<CVec> d_spec(m);
    for (std::size_t s = 0; s < m; ++s) {
        CVec buf(len);
        auto hs = system.h.row(s);
        for (std::size_t r = 0; r < k; ++r) buf[r] = hs[r];
        fft_forward(buf);
        d_spec[s] = std::move(buf);
    }

    // independent dense solve per frequency slice
    std::vector<CVec> x(m, CVec(len));
    Eigen::MatrixXcd slice(m, m);
    Eigen::VectorXcd rhs(m);
    for (std::size_t tau = 0; tau < len; ++tau) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double p = system.prob(i, j);
                std::complex<double> v = p == 0.0 ? 0.0 : -p * c_spec[i * m + j][tau];
                if (i == j) v += 1.0;
                slice(i, j) = v;
            }
            rhs(i) = d_spec[i][tau];
        }
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(slice);
        const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        const double scale = std::max(1.0, slice.cwiseAbs().maxCoeff());
        if (pivot_min < 1e-14 * scale) {
            std::ostringstream os;
            os << "solve_lu_approx: singular frequency slice at tau = " << tau;
            throw SingularSliceMatrix(os.str(), tau);
        }
        Eigen::VectorXcd sol = lu.solve(rhs);
        for (std::size_t i = 0; i < m; ++i) x[i][tau] = sol(i);
    }

    SolveReport report;
    report.solution = Hypervector(k, m);
    for (std::size_t s = 0; s < m; ++s) {
        CVec inv = idft_complex(x[s]);
        Vec row(k);
        for (std::size_t r = 0; r < k; ++r) row[r] = inv[r].real();
        report.solution.set_row(s, row);
    }
    report.termination = Termination::Direct;
    report.iterations = 0;
    report.residual = 0.0;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace smrm
