#include "smrm/convkernel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include <fftw3.h>

#include "smrm/errors.hpp"

namespace smrm {

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array
// interface is. Plans are cached per (length, direction) and created with
// FFTW_UNALIGNED so they can run on arbitrary buffers.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
        fftw_cleanup();
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        CVec scratch(n);
        auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan =
            fftw_plan_dft_1d(static_cast<int>(n), ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    struct KeyHash {
        std::size_t operator()(const std::pair<std::size_t, int>& k) const {
            return std::hash<std::size_t>()(k.first) ^ (k.second == FFTW_FORWARD ? 0 : 0x9e3779b9);
        }
    };
    std::mutex mutex_;
    std::unordered_map<std::pair<std::size_t, int>, fftw_plan, KeyHash> plans_;
};

void run_fft(CVec& buf, int sign) {
    if (buf.empty()) throw DegenerateLength("dft: zero-length input");
    fftw_plan plan = PlanCache::instance().get(buf.size(), sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plan, ptr, ptr);
}

} // namespace

void fft_forward(CVec& buf) { run_fft(buf, FFTW_FORWARD); }

void fft_inverse(CVec& buf) {
    run_fft(buf, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(buf.size());
    for (auto& z : buf) z *= scale;
}

PaddedVector pad_widetilde(const Vec& v) {
    const std::size_t k = v.size();
    PaddedVector out;
    out.original_len = k;
    out.padded_len = k == 0 ? 0 : 2 * k - 1;
    out.values = v;
    out.values.resize(out.padded_len, 0.0);
    return out;
}

PaddedVector pad_widehat(const Vec& v, std::size_t n) {
    const std::size_t k = v.size();
    PaddedVector out;
    out.original_len = k;
    out.padded_len = n + k;
    out.values = v;
    out.values.resize(out.padded_len, 0.0);
    return out;
}

SpectrumVector dft(const Vec& v) {
    CVec buf(v.begin(), v.end());
    fft_forward(buf);
    return SpectrumVector{std::move(buf), v.size()};
}

CVec dft(const CVec& v) {
    CVec buf = v;
    fft_forward(buf);
    return buf;
}

Vec idft(const SpectrumVector& s) {
    CVec buf = s.values;
    fft_inverse(buf);
    Vec out(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
    return out;
}

CVec idft_complex(const CVec& v) {
    CVec buf = v;
    fft_inverse(buf);
    return buf;
}

Vec conv_k(const Vec& v1, const Vec& v2, std::size_t k) {
    if (k == 0) throw DegenerateLength("conv_k: k must be positive");
    const std::size_t n = 2 * k - 1;
    CVec a(n), b(n);
    for (std::size_t i = 0; i < k && i < v1.size(); ++i) a[i] = v1[i];
    for (std::size_t i = 0; i < k && i < v2.size(); ++i) b[i] = v2[i];
    fft_forward(a);
    fft_forward(b);
    for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
    fft_inverse(a);
    Vec out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = a[i].real();
    return out;
}

Vec conv_direct(const Vec& v1, const Vec& v2, std::size_t k) {
    if (k == 0) throw DegenerateLength("conv_direct: k must be positive");
    Vec out(k, 0.0);
    const std::size_t n1 = std::min(k, v1.size());
    for (std::size_t i = 0; i < n1; ++i) {
        const double a = v1[i];
        if (a == 0.0) continue;
        const std::size_t n2 = std::min(k - i, v2.size());
        for (std::size_t j = 0; j < n2; ++j) out[i + j] += a * v2[j];
    }
    return out;
}

Vec deconv_k(const Vec& numer, const Vec& denom, std::size_t k) {
    if (k == 0) throw DegenerateLength("deconv_k: k must be positive");
    const double d0 = denom.empty() ? 0.0 : denom[0];
    if (std::abs(d0) < 1e-300)
        throw NotFullDeconvolutor("deconv_k: divisor zeroth entry vanishes");
    Vec q(k, 0.0);
    const double inv = 1.0 / d0;
    for (std::size_t i = 0; i < k; ++i) {
        double acc = i < numer.size() ? numer[i] : 0.0;
        const std::size_t jmax = std::min(i, denom.size() > 0 ? denom.size() - 1 : 0);
        for (std::size_t j = 1; j <= jmax; ++j) acc -= denom[j] * q[i - j];
        q[i] = acc * inv;
    }
    return q;
}

Vec delta_vec(std::size_t k) {
    Vec d(k, 0.0);
    if (k > 0) d[0] = 1.0;
    return d;
}

} // namespace smrm
