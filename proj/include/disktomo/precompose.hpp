#pragma once

//==============================================================================
// precompose.hpp
// Superposition (precomposition) operators F_xi(f) = f o xi on H^{1/2}(S^1):
// quasi-symmetry diagnostics (doubling constant), truncated operator norms in
// the H^{1/2}-orthonormalized Fourier basis {e^{in.}/sqrt|n|}, distortion of
// the basis functions ||e^{in xi} - e^{in.}||_{H^{1/2}}, and the composition
// error against the modulus-of-continuity bound
//     ||u o xi - u||_{H^{1/2}} <= C ||u||_{H^{1+d}} w_{d'}(||xi - I||_{W^{1,inf}}),
//     w_{d'}(t) = max(t^{d'+1/2}, t^{d'}).
//==============================================================================

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "disktomo/circle_map.hpp"
#include "disktomo/fourier_series.hpp"

namespace disktomo {

// w_{d'}(t) = max(t^{d'+1/2}, t^{d'}): t^{d'} for t <= 1, t^{d'+1/2} beyond.
struct ModulusOfContinuity {
    double delta_prime;
    explicit ModulusOfContinuity(double dp) : delta_prime(dp) {
        if (!(dp > 0.0 && dp < 1.0))
            throw std::invalid_argument("ModulusOfContinuity: exponent must lie in (0,1)");
    }
    double operator()(double t) const {
        if (t < 0.0) throw std::invalid_argument("ModulusOfContinuity: negative argument");
        if (t == 0.0) return 0.0;
        return std::max(std::pow(t, delta_prime + 0.5), std::pow(t, delta_prime));
    }
};

// Empirical sup of |xi(2I)| / |xi(I)| over a midpoint x length family of
// intervals with |I| < pi.
inline double doubling_constant(const CircleMap& xi, int interval_samples = 100) {
    if (interval_samples < 2)
        throw std::invalid_argument("doubling_constant: need at least 2 samples per axis");
    double sup = 0.0;
    for (int a = 0; a < interval_samples; ++a) {
        const double mid = two_pi * a / interval_samples;
        for (int b = 0; b < interval_samples; ++b) {
            const double len = pi_const * (b + 1) / (interval_samples + 1);
            const double i1 = xi.xi(mid + 0.5 * len) - xi.xi(mid - 0.5 * len);
            const double i2 = xi.xi(mid + len) - xi.xi(mid - len);
            sup = std::max(sup, i2 / i1);
        }
    }
    return sup;
}

// e^{in xi(theta)} as a series, resolved well past the bandwidth n(1 + |d'|).
inline FourierSeries exponential_compose(int n, const CircleMap& xi, int min_degree = 0) {
    const double stretch = 1.0 + w1inf_distance(xi);
    const int band = static_cast<int>(std::ceil(std::abs(n) * stretch)) + xi.degree() + 16;
    const std::size_t S = detail::next_pow2(static_cast<std::size_t>(
        std::max(4 * band, std::max(2 * min_degree + 2, 64))));
    std::vector<cdouble> vals(S);
    for (std::size_t j = 0; j < S; ++j) {
        const double x = xi.xi(two_pi * static_cast<double>(j) / static_cast<double>(S));
        vals[j] = cdouble(std::cos(n * x), std::sin(n * x));
    }
    return from_samples(vals);
}

// Matrix of F_xi in the H^{1/2}-orthonormalized basis e^{in.}/sqrt|n|,
// n in [-N,N] \ {0} (dimension 2N); the identity map gives the identity
// matrix.
struct OperatorMatrix {
    int n_modes = 0;
    Eigen::MatrixXcd entries;
};

inline OperatorMatrix operator_matrix(const CircleMap& xi, int N) {
    if (N < 4) throw std::invalid_argument("operator_matrix: need N >= 4");
    OperatorMatrix out;
    out.n_modes = N;
    const int dim = 2 * N;
    out.entries.resize(dim, dim);
    auto index = [N](int n) { return n < 0 ? n + N : n + N - 1; };
    for (int n = -N; n <= N; ++n) {
        if (n == 0) continue;
        const FourierSeries col = exponential_compose(n, xi, N);
        for (int m = -N; m <= N; ++m) {
            if (m == 0) continue;
            out.entries(index(m), index(n)) =
                col.coeff(m) * std::sqrt(std::abs(static_cast<double>(m)) /
                                         std::abs(static_cast<double>(n)));
        }
    }
    return out;
}

namespace detail {

// exact largest singular value through the Hermitian eigenproblem of M^H M
inline double matrix_spectral_norm(const Eigen::MatrixXcd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M,
                                                       Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    return lmax > 0.0 ? std::sqrt(lmax) : 0.0;
}

} // namespace detail

// Largest singular value of the truncated F_xi matrix: a truncated-space
// proxy for ||F_xi|| on H^{1/2} modulo constants.
inline double operator_norm(const CircleMap& xi, int N) {
    return detail::matrix_spectral_norm(operator_matrix(xi, N).entries);
}

// || e^{in xi} - e^{in.} ||_{H^{1/2}} via the multiplier seminorm of the
// oversampled difference.
inline double basis_distortion(int n, const CircleMap& xi) {
    if (n < 1) throw std::invalid_argument("basis_distortion: n must be positive");
    FourierSeries diff = exponential_compose(n, xi);
    diff.set_coeff(n, diff.coeff(n) - 1.0);
    return sobolev_norm(diff, h_half);
}

struct CompositionError {
    double error = 0.0;       // ||u o xi - u||_{H^{1/2}}
    double bound = 0.0;       // ||u||_{H^{1+delta}} w_{delta'}(||xi - I||_{W^{1,inf}})
    double delta_prime = 0.0; // exponent used in the modulus
    double w1inf = 0.0;
};

// delta_prime defaults to delta/2 (any value in (0, delta) is admissible).
inline CompositionError composition_error(const FourierSeries& u, const CircleMap& xi,
                                          double delta, double delta_prime = 0.0) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("composition_error: delta must lie in (0,1)");
    if (delta_prime == 0.0) delta_prime = 0.5 * delta;
    if (!(delta_prime > 0.0 && delta_prime < delta))
        throw std::invalid_argument("composition_error: need delta' in (0, delta)");
    CompositionError out;
    out.delta_prime = delta_prime;
    out.w1inf = w1inf_distance(xi);
    const int target = 4 * std::max({u.degree(), xi.degree(), 16});
    out.error = sobolev_norm(compose_with_target(u, xi, target) - u, h_half);
    out.bound = sobolev_norm(u, SobolevIndex(1.0 + delta)) * ModulusOfContinuity(delta_prime)(out.w1inf);
    return out;
}

struct NormSymmetry {
    double norm_forward = 0.0;
    double norm_inverse = 0.0;
};

// ||F_xi|| vs ||F_{xi^{-1}}|| on the truncated space; the relative gap is a
// truncation diagnostic (the equality is exact only in the full space).
inline NormSymmetry norm_symmetry_check(const CircleMap& xi, int N) {
    return NormSymmetry{operator_norm(xi, N), operator_norm(invert_circle_map(xi), N)};
}

} // namespace disktomo
