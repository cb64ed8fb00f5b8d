#include "smrm/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace smrm {

void Hypermatrix::set_slice(std::size_t i, std::size_t j, const Vec& v) {
    auto dst = slice(i, j);
    const std::size_t n = std::min(v.size(), dst.size());
    std::copy_n(v.begin(), n, dst.begin());
    std::fill(dst.begin() + n, dst.end(), 0.0);
}

void Hypervector::set_row(std::size_t s, const Vec& v) {
    auto dst = row(s);
    const std::size_t n = std::min(v.size(), dst.size());
    std::copy_n(v.begin(), n, dst.begin());
    std::fill(dst.begin() + n, dst.end(), 0.0);
}

double Hypervector::max_abs_diff(const Hypervector& other) const {
    if (len_ != other.len_ || rows_ != other.rows_)
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i)
        m = std::max(m, std::abs(data_[i] - other.data_[i]));
    return m;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxIterations: return "max-iterations";
        case Termination::Diverged: return "diverged";
        case Termination::Direct: return "direct";
    }
    return "unknown";
}

} // namespace smrm
