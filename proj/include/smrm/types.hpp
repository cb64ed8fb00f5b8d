#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace smrm {

using Vec = std::vector<double>;
using CVec = std::vector<std::complex<double>>;

/// 3-D array (value-axis x rows x cols) of reals. Convolution of the value
/// axis plays the role of multiplication; the row/col axes index states.
class Hypermatrix {
  public:
    Hypermatrix() = default;
    Hypermatrix(std::size_t len, std::size_t rows, std::size_t cols)
        : len_(len), rows_(rows), cols_(cols), data_(len * rows * cols, 0.0) {}

    std::size_t len() const { return len_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::span<double> slice(std::size_t i, std::size_t j) {
        return {data_.data() + (i * cols_ + j) * len_, len_};
    }
    std::span<const double> slice(std::size_t i, std::size_t j) const {
        return {data_.data() + (i * cols_ + j) * len_, len_};
    }
    Vec slice_vec(std::size_t i, std::size_t j) const {
        auto s = slice(i, j);
        return Vec(s.begin(), s.end());
    }
    void set_slice(std::size_t i, std::size_t j, const Vec& v);

  private:
    std::size_t len_ = 0, rows_ = 0, cols_ = 0;
    Vec data_;
};

/// 2-D array (value-axis x states) of reals.
class Hypervector {
  public:
    Hypervector() = default;
    Hypervector(std::size_t len, std::size_t rows)
        : len_(len), rows_(rows), data_(len * rows, 0.0) {}

    std::size_t len() const { return len_; }
    std::size_t rows() const { return rows_; }

    std::span<double> row(std::size_t s) { return {data_.data() + s * len_, len_}; }
    std::span<const double> row(std::size_t s) const { return {data_.data() + s * len_, len_}; }
    Vec row_vec(std::size_t s) const {
        auto r = row(s);
        return Vec(r.begin(), r.end());
    }
    void set_row(std::size_t s, const Vec& v);

    double max_abs_diff(const Hypervector& other) const;

  private:
    std::size_t len_ = 0, rows_ = 0;
    Vec data_;
};

enum class Termination { Converged, MaxIterations, Diverged, Direct };

std::string to_string(Termination t);

/// Outcome of a solver run. For direct methods iterations is 0 and residual
/// is 0; for iterative methods residual is the final max-abs iterate
/// difference.
struct SolveReport {
    Hypervector solution;
    std::size_t iterations = 0;
    double residual = 0.0;
    double wall_time = 0.0;
    Termination termination = Termination::Direct;
    Vec history; // per-iteration max-diff, filled when requested
};

} // namespace smrm
