#pragma once

//==============================================================================
// fourier_series.hpp
// Truncated complex Fourier series on the unit circle,
//     f(e^{i theta}) = sum_{|n| <= N} c_n e^{i n theta},
// with the convention c_n = (1/2pi) \int f(e^{i theta}) e^{-i n theta} dtheta.
// Spectral primitives built on top of it:
//   - sample <-> coefficient transforms,
//   - exact trigonometric-polynomial evaluation at arbitrary angles,
//   - Hilbert transform (conjugate function) and differentiation multipliers,
//   - H^s multiplier norms (n = 0 mode dropped: functions modulo constants),
//   - the intrinsic (double-integral) H^{1/2} seminorm.
//==============================================================================

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "disktomo/fft.hpp"

namespace disktomo {

constexpr double pi_const = 3.14159265358979323846264338328;
constexpr double two_pi = 6.28318530717958647692528676656;

// Sobolev exponent s of H^s(S^1); the induced norm always drops the n = 0
// mode, so these are norms on functions modulo constants.
struct SobolevIndex {
    double s;
    constexpr explicit SobolevIndex(double s_) : s(s_) {}
};

inline constexpr SobolevIndex h_half{0.5};
inline constexpr SobolevIndex h_minus_half{-0.5};

class FourierSeries {
public:
    FourierSeries() : degree_(0), c_(1, cdouble(0.0, 0.0)) {}

    explicit FourierSeries(int degree)
        : degree_(degree), c_(2 * static_cast<std::size_t>(check_degree(degree)) + 1) {}

    // coeffs holds c_{-N}..c_{N}, size 2N+1 (odd).
    static FourierSeries from_coefficients(std::vector<cdouble> coeffs) {
        if (coeffs.empty() || coeffs.size() % 2 == 0)
            throw std::invalid_argument("FourierSeries: coefficient count must be odd");
        FourierSeries s;
        s.degree_ = static_cast<int>(coeffs.size() / 2);
        s.c_ = std::move(coeffs);
        return s;
    }

    int degree() const { return degree_; }

    cdouble coeff(int n) const {
        if (n < -degree_ || n > degree_) return cdouble(0.0, 0.0);
        return c_[static_cast<std::size_t>(n + degree_)];
    }

    void set_coeff(int n, cdouble v) {
        if (n < -degree_ || n > degree_)
            throw std::invalid_argument("FourierSeries::set_coeff: index out of range");
        c_[static_cast<std::size_t>(n + degree_)] = v;
    }

    const std::vector<cdouble>& coefficients() const { return c_; }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    // Largest |c_n| violation of the real-function symmetry c_{-n} = conj(c_n).
    double reality_defect() const {
        double d = std::abs(c_[static_cast<std::size_t>(degree_)].imag());
        for (int n = 1; n <= degree_; ++n)
            d = std::max(d, std::abs(coeff(-n) - std::conj(coeff(n))));
        return d;
    }

    bool is_real(double tol = 1e-10) const { return reality_defect() <= tol; }

private:
    static int check_degree(int degree) {
        if (degree < 0) throw std::invalid_argument("FourierSeries: negative degree");
        return degree;
    }

    int degree_;
    std::vector<cdouble> c_;
};

//------------------------------------------------------------------------------
// transforms
//------------------------------------------------------------------------------

// Build a degree-(M-1) series from samples at the 2M equispaced nodes
// theta_j = 2 pi j / (2M). The Nyquist bin is discarded; for inputs that are
// trigonometric polynomials of degree <= M-1 the node values are reproduced
// exactly.
inline FourierSeries from_samples(const std::vector<cdouble>& samples) {
    if (samples.empty() || samples.size() % 2 != 0)
        throw std::invalid_argument("from_samples: need a nonempty even number of samples");
    const std::size_t s = samples.size();
    std::vector<cdouble> bins = samples;
    fft_forward(bins);
    const int deg = static_cast<int>(s / 2) - 1;
    std::vector<cdouble> coeffs(2 * static_cast<std::size_t>(deg) + 1);
    const double inv_s = 1.0 / static_cast<double>(s);
    for (int n = -deg; n <= deg; ++n) {
        const std::size_t bin = static_cast<std::size_t>((n + static_cast<int>(s)) % static_cast<int>(s));
        coeffs[static_cast<std::size_t>(n + deg)] = bins[bin] * inv_s;
    }
    return FourierSeries::from_coefficients(std::move(coeffs));
}

inline FourierSeries from_samples(const std::vector<double>& samples) {
    std::vector<cdouble> c(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) c[i] = cdouble(samples[i], 0.0);
    return from_samples(c);
}

// Values at count equispaced nodes; exact (FFT synthesis) whenever
// count >= 2N+1, direct summation otherwise.
inline std::vector<cdouble> samples(const FourierSeries& f, std::size_t count);

// Exact evaluation sum c_n e^{i n theta} (Horner in z = e^{i theta}).
inline cdouble evaluate(const FourierSeries& f, double theta) {
    const int n = f.degree();
    const cdouble z(std::cos(theta), std::sin(theta));
    cdouble acc(0.0, 0.0);
    for (int k = n; k >= -n; --k) acc = acc * z + f.coeff(k);
    // acc = sum c_k z^{k+n}; undo the z^n offset
    const cdouble zn(std::cos(n * theta), std::sin(n * theta));
    return acc / zn;
}

inline std::vector<cdouble> evaluate(const FourierSeries& f, const std::vector<double>& thetas) {
    std::vector<cdouble> out(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) out[i] = evaluate(f, thetas[i]);
    return out;
}

inline std::vector<cdouble> samples(const FourierSeries& f, std::size_t count) {
    if (count == 0) throw std::invalid_argument("samples: count must be positive");
    const int n = f.degree();
    if (count >= 2 * static_cast<std::size_t>(n) + 1) {
        std::vector<cdouble> bins(count, cdouble(0.0, 0.0));
        for (int k = -n; k <= n; ++k) {
            const std::size_t bin =
                static_cast<std::size_t>((k + static_cast<int>(count)) % static_cast<int>(count));
            bins[bin] += f.coeff(k);
        }
        fft_inverse(bins);
        // fft_inverse scales by 1/count; synthesis needs the unscaled sum
        for (auto& v : bins) v *= static_cast<double>(count);
        return bins;
    }
    std::vector<cdouble> out(count);
    for (std::size_t j = 0; j < count; ++j)
        out[j] = evaluate(f, two_pi * static_cast<double>(j) / static_cast<double>(count));
    return out;
}

inline std::vector<double> real_samples(const FourierSeries& f, std::size_t count) {
    auto s = samples(f, count);
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].real();
    return out;
}

//------------------------------------------------------------------------------
// multipliers
//------------------------------------------------------------------------------

// Conjugate function on the circle: c_n -> -i sgn(n) c_n, c_0 -> 0.
inline FourierSeries hilbert_transform(const FourierSeries& f) {
    FourierSeries g(f.degree());
    for (int n = 1; n <= f.degree(); ++n) {
        g.set_coeff(n, cdouble(0.0, -1.0) * f.coeff(n));
        g.set_coeff(-n, cdouble(0.0, 1.0) * f.coeff(-n));
    }
    return g;
}

// d/dtheta: c_n -> i n c_n.
inline FourierSeries derivative(const FourierSeries& f) {
    FourierSeries g(f.degree());
    for (int n = -f.degree(); n <= f.degree(); ++n)
        g.set_coeff(n, cdouble(0.0, static_cast<double>(n)) * f.coeff(n));
    return g;
}

// ( sum_{n != 0} |n|^{2s} |c_n|^2 )^{1/2}; at s = 1/2 this is the H^{1/2}
// seminorm (sum |n| |c_n|^2)^{1/2}.
inline double sobolev_norm(const FourierSeries& f, SobolevIndex s) {
    double acc = 0.0;
    for (int n = 1; n <= f.degree(); ++n) {
        const double w = std::pow(static_cast<double>(n), 2.0 * s.s);
        acc += w * (std::norm(f.coeff(n)) + std::norm(f.coeff(-n)));
    }
    return std::sqrt(acc);
}

//------------------------------------------------------------------------------
// arithmetic helpers
//------------------------------------------------------------------------------

inline FourierSeries operator+(const FourierSeries& a, const FourierSeries& b) {
    FourierSeries out(std::max(a.degree(), b.degree()));
    for (int n = -out.degree(); n <= out.degree(); ++n) out.set_coeff(n, a.coeff(n) + b.coeff(n));
    return out;
}

inline FourierSeries operator-(const FourierSeries& a, const FourierSeries& b) {
    FourierSeries out(std::max(a.degree(), b.degree()));
    for (int n = -out.degree(); n <= out.degree(); ++n) out.set_coeff(n, a.coeff(n) - b.coeff(n));
    return out;
}

inline FourierSeries operator*(double s, const FourierSeries& a) {
    FourierSeries out(a.degree());
    for (int n = -a.degree(); n <= a.degree(); ++n) out.set_coeff(n, s * a.coeff(n));
    return out;
}

inline FourierSeries truncated(const FourierSeries& f, int degree) {
    FourierSeries out(degree);
    for (int n = -degree; n <= degree; ++n) out.set_coeff(n, f.coeff(n));
    return out;
}

// Drop the negligible outer tail: smallest degree whose discarded coefficients
// are all below rel_tol * max|c_n|.
inline FourierSeries trim_tail(const FourierSeries& f, double rel_tol = 1e-14) {
    const double cut = rel_tol * std::max(f.max_abs_coeff(), 1e-300);
    int deg = f.degree();
    while (deg > 0 && std::abs(f.coeff(deg)) < cut && std::abs(f.coeff(-deg)) < cut) --deg;
    return truncated(f, deg);
}

// Convenience constructors used all over the test and bench code.
inline FourierSeries cosine_series(int k = 1, double amplitude = 1.0) {
    FourierSeries f(k);
    f.set_coeff(k, cdouble(amplitude / 2.0, 0.0));
    f.set_coeff(-k, cdouble(amplitude / 2.0, 0.0));
    return f;
}

inline FourierSeries sine_series(int k = 1, double amplitude = 1.0) {
    FourierSeries f(k);
    f.set_coeff(k, cdouble(0.0, -amplitude / 2.0));
    f.set_coeff(-k, cdouble(0.0, amplitude / 2.0));
    return f;
}

inline FourierSeries constant_series(double value) {
    FourierSeries f(0);
    f.set_coeff(0, cdouble(value, 0.0));
    return f;
}

inline FourierSeries exponential_series(int k, cdouble amplitude = cdouble(1.0, 0.0)) {
    FourierSeries f(std::abs(k));
    f.set_coeff(k, amplitude);
    return f;
}

//------------------------------------------------------------------------------
// intrinsic H^{1/2} seminorm
//------------------------------------------------------------------------------

// Gagliardo double integral
//   (1/4pi) \iint |f(theta)-f(alpha)|^2 / |e^{i theta}-e^{i alpha}|^2,
// returned as its square root. The integrand of a degree-N trigonometric
// polynomial is itself a trigonometric polynomial of degree <= 2N-2 in each
// variable, so the tensor trapezoid rule on >= 4N nodes per axis is exact up
// to round-off; on the diagonal the limit is |f'(theta)|^2.
inline double intrinsic_half_norm(const FourierSeries& f, std::size_t quad_points = 0) {
    const int n = f.degree();
    const std::size_t min_points = 4 * static_cast<std::size_t>(std::max(n, 1));
    if (quad_points == 0) quad_points = std::max<std::size_t>(64, min_points);
    if (quad_points < min_points)
        throw std::invalid_argument("intrinsic_half_norm: quadrature below 4x degree would alias");

    const std::size_t q = quad_points;
    const auto fv = samples(f, q);
    const auto dv = samples(derivative(f), q);

    // |e^{i theta_j} - e^{i theta_k}|^2 = 4 sin^2((j-k) pi / q): one table per offset
    std::vector<double> denom(q, 0.0);
    for (std::size_t d = 1; d < q; ++d) {
        const double s = std::sin(pi_const * static_cast<double>(d) / static_cast<double>(q));
        denom[d] = 4.0 * s * s;
    }

    double acc = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        for (std::size_t k = 0; k < q; ++k) {
            if (j == k) {
                acc += std::norm(dv[j]);
            } else {
                const std::size_t d = j > k ? j - k : k - j;
                acc += std::norm(fv[j] - fv[k]) / denom[d];
            }
        }
    }
    const double hstep = two_pi / static_cast<double>(q);
    return std::sqrt(acc * hstep * hstep / (4.0 * pi_const));
}

} // namespace disktomo
