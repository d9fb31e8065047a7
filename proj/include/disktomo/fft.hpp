#pragma once

//==============================================================================
// fft.hpp
// Self-contained complex FFT used by the spectral layer.
//   - iterative radix-2 Cooley-Tukey for power-of-two lengths,
//   - Bluestein's chirp-z fallback for every other length, so that sample
//     grids of any even size are admissible.
// Forward transform uses e^{-i 2pi jk/n} without normalization; the inverse
// divides by n. Everything is deterministic (no plans, no global state).
//==============================================================================

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace disktomo {

using cdouble = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place radix-2, n a power of two. sign = -1 forward, +1 inverse kernel.
inline void fft_pow2(std::vector<cdouble>& a, int sign) {
    const std::size_t n = a.size();
    if (n < 2) return;
    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * two_pi / static_cast<double>(len);
        const cdouble wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdouble u = a[i + k];
                cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Bluestein chirp-z transform for arbitrary n (delegates to fft_pow2).
inline void fft_bluestein(std::vector<cdouble>& a, int sign) {
    const std::size_t n = a.size();
    const double pi = 3.14159265358979323846264338328;
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cdouble> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument small for large k
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cdouble(std::cos(ang), std::sin(ang));
    }
    std::vector<cdouble> x(m, cdouble(0.0, 0.0)), y(m, cdouble(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);
    fft_pow2(x, -1);
    fft_pow2(y, -1);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x, +1);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * inv_m * chirp[k];
}

} // namespace detail

// Forward DFT: X_k = sum_j x_j e^{-2pi i jk/n} (no scaling).
inline void fft_forward(std::vector<cdouble>& a) {
    if (a.empty()) throw std::invalid_argument("fft_forward: empty input");
    if (detail::is_pow2(a.size()))
        detail::fft_pow2(a, -1);
    else
        detail::fft_bluestein(a, -1);
}

// Inverse DFT: x_j = (1/n) sum_k X_k e^{+2pi i jk/n}.
inline void fft_inverse(std::vector<cdouble>& a) {
    if (a.empty()) throw std::invalid_argument("fft_inverse: empty input");
    if (detail::is_pow2(a.size()))
        detail::fft_pow2(a, +1);
    else
        detail::fft_bluestein(a, +1);
    const double inv_n = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v *= inv_n;
}

} // namespace disktomo
