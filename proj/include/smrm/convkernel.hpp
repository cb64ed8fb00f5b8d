#pragma once

#include <complex>
#include <cstddef>

#include "smrm/types.hpp"

namespace smrm {

/// Vector zero-extended beyond its original length. padded_len is 2k-1 for
/// the exact linear-convolution scheme and n+k for the tunable scheme.
struct PaddedVector {
    Vec values;
    std::size_t original_len = 0;
    std::size_t padded_len = 0;
};

/// Complex spectrum of a padded vector.
struct SpectrumVector {
    CVec values;
    std::size_t length = 0;
};

/// Zero-pad v (length k) to 2k-1 entries.
PaddedVector pad_widetilde(const Vec& v);

/// Zero-pad v (length k) to n+k entries. n = k-1 reproduces pad_widetilde.
PaddedVector pad_widehat(const Vec& v, std::size_t n);

/// Forward discrete Fourier transform, any length.
SpectrumVector dft(const Vec& v);
CVec dft(const CVec& v);

/// Inverse transform; idft(dft(v)) == v up to rounding.
Vec idft(const SpectrumVector& s);
CVec idft_complex(const CVec& v);

/// In-place complex FFT helpers used by the solvers (forward: sign -1).
void fft_forward(CVec& buf);
void fft_inverse(CVec& buf);

/// First k values of the exact linear convolution of v1 and v2, computed by
/// widetilde padding, forward transforms, pointwise product and inverse
/// transform. Inputs longer than k are truncated; shorter ones are treated
/// as zero-extended.
Vec conv_k(const Vec& v1, const Vec& v2, std::size_t k);

/// Direct O(k^2) convolution, kept as the independent reference.
Vec conv_direct(const Vec& v1, const Vec& v2, std::size_t k);

/// Quotient q (length k) with conv(q, denom)[0:k] == numer[0:k] in exact
/// arithmetic, computed by the recursive division formula. Requires a full
/// deconvolutor: |denom[0]| above the denormal guard.
Vec deconv_k(const Vec& numer, const Vec& denom, std::size_t k);

/// Kronecker delta as a k-vector (1 at index 0).
Vec delta_vec(std::size_t k);

} // namespace smrm
