#pragma once

//==============================================================================
// circle_map.hpp
// Orientation-preserving diffeomorphisms xi of S^1, stored through the real
// periodic displacement d = xi - Id (a truncated Fourier series) together
// with its derivative. Composition of a trigonometric polynomial with such a
// map, map inversion (Newton per node) and the W^{1,inf} distance to the
// identity live here; the conformal solvers produce CircleMaps, the DtN and
// precomposition layers consume them.
//==============================================================================

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "disktomo/errors.hpp"
#include "disktomo/fourier_series.hpp"

namespace disktomo {

class CircleMap {
public:
    CircleMap() : CircleMap(FourierSeries(0)) {}

    static CircleMap identity() { return CircleMap(FourierSeries(0)); }

    static CircleMap rotation(double c) { return CircleMap(constant_series(c)); }

    static CircleMap from_displacement(FourierSeries displacement) {
        return CircleMap(std::move(displacement));
    }

    // Displacement samples at equispaced nodes (even count); trailing
    // negligible coefficients are trimmed.
    static CircleMap from_displacement_samples(const std::vector<double>& disp_samples,
                                               double trim_rel = 1e-14) {
        return CircleMap(trim_tail(from_samples(disp_samples), trim_rel));
    }

    const FourierSeries& displacement() const { return disp_; }
    const FourierSeries& displacement_derivative() const { return dderiv_; }
    int degree() const { return disp_.degree(); }

    double xi(double theta) const { return theta + evaluate(disp_, theta).real(); }
    double xi_prime(double theta) const { return 1.0 + evaluate(dderiv_, theta).real(); }

    double min_derivative() const { return min_deriv_; }
    double max_abs_displacement() const { return max_disp_; }

    // Cached dense-grid samples (validation grid) of xi and xi'.
    std::vector<double> xi_samples(std::size_t count) const {
        auto d = real_samples(disp_, count);
        for (std::size_t j = 0; j < count; ++j)
            d[j] += two_pi * static_cast<double>(j) / static_cast<double>(count);
        return d;
    }

    std::vector<double> xi_prime_samples(std::size_t count) const {
        auto d = real_samples(dderiv_, count);
        for (auto& v : d) v += 1.0;
        return d;
    }

private:
    explicit CircleMap(FourierSeries displacement)
        : disp_(std::move(displacement)), dderiv_(derivative(disp_)) {
        if (!disp_.is_real(1e-9 * std::max(1.0, disp_.max_abs_coeff())))
            throw std::invalid_argument("CircleMap: displacement must be a real series");
        const std::size_t grid = std::max<std::size_t>(256, 32 * static_cast<std::size_t>(disp_.degree() + 1));
        const auto dp = real_samples(dderiv_, grid);
        const auto dd = real_samples(disp_, grid);
        min_deriv_ = 1.0;
        max_disp_ = 0.0;
        for (std::size_t j = 0; j < grid; ++j) {
            min_deriv_ = std::min(min_deriv_, 1.0 + dp[j]);
            max_disp_ = std::max(max_disp_, std::abs(dd[j]));
        }
        if (min_deriv_ <= 0.0)
            throw std::invalid_argument("CircleMap: map is not orientation-preserving (xi' <= 0)");
        if (max_disp_ >= pi_const)
            throw std::invalid_argument("CircleMap: displacement exceeds pi");
    }

    FourierSeries disp_;
    FourierSeries dderiv_;
    double min_deriv_ = 1.0;
    double max_disp_ = 0.0;
};

//------------------------------------------------------------------------------
// composition of a series with a map
//------------------------------------------------------------------------------

// f o xi at an explicit output degree: exact evaluation of the polynomial at
// the mapped nodes xi(theta_j), then one transform back. f o xi is not
// band-limited, so target_degree controls the aliasing floor.
inline FourierSeries compose_with_target(const FourierSeries& f, const CircleMap& map,
                                         int target_degree) {
    if (target_degree < 0) throw std::invalid_argument("compose: negative target degree");
    const std::size_t count = 2 * static_cast<std::size_t>(target_degree) + 2;
    const auto nodes = map.xi_samples(count);
    std::vector<cdouble> vals(count);
    for (std::size_t j = 0; j < count; ++j) vals[j] = evaluate(f, nodes[j]);
    return from_samples(vals);
}

// Default resolution rule: oversample x the largest bandwidth in sight.
inline FourierSeries compose(const FourierSeries& f, const CircleMap& map, int oversample = 2,
                             int min_degree = 16) {
    if (oversample < 2) throw std::invalid_argument("compose: oversample factor must be >= 2");
    const int base = std::max({f.degree(), map.degree(), min_degree});
    return compose_with_target(f, map, oversample * base);
}

// theta -> outer(inner(theta)).
inline CircleMap compose_maps(const CircleMap& outer, const CircleMap& inner) {
    const int target = 2 * std::max({outer.degree(), inner.degree(), 16});
    const std::size_t count = 2 * static_cast<std::size_t>(target) + 2;
    const auto inner_nodes = inner.xi_samples(count);
    std::vector<double> disp(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double theta = two_pi * static_cast<double>(j) / static_cast<double>(count);
        disp[j] = outer.xi(inner_nodes[j]) - theta;
    }
    return CircleMap::from_displacement_samples(disp);
}

//------------------------------------------------------------------------------
// inversion
//------------------------------------------------------------------------------

// Newton per node: solves xi(x) = y on a fine grid and rebuilds the inverse
// displacement spectrally. Round-trip accuracy is checked against tol.
inline CircleMap invert_circle_map(const CircleMap& map, double tol = 1e-12) {
    if (map.min_derivative() <= 0.0)
        throw std::invalid_argument("invert_circle_map: map is not monotone");
    const int target = 2 * std::max(map.degree(), 16);
    const std::size_t count = 2 * static_cast<std::size_t>(target) + 2;
    std::vector<double> disp(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double y = two_pi * static_cast<double>(j) / static_cast<double>(count);
        double x = y - evaluate(map.displacement(), y).real(); // first-order guess
        for (int it = 0; it < 60; ++it) {
            const double r = map.xi(x) - y;
            if (std::abs(r) < 0.1 * tol) break;
            x -= r / map.xi_prime(x);
        }
        disp[j] = x - y;
    }
    CircleMap inv = CircleMap::from_displacement_samples(disp);
    // spot-check the round trip
    double worst = 0.0;
    for (int j = 0; j < 17; ++j) {
        const double theta = two_pi * j / 17.0;
        worst = std::max(worst, std::abs(map.xi(inv.xi(theta)) - theta));
    }
    if (worst > std::max(tol, 1e-11))
        throw divergence_error("invert_circle_map: round-trip check failed", worst);
    return inv;
}

//------------------------------------------------------------------------------
// diagnostics
//------------------------------------------------------------------------------

// max(sup |xi - Id|, sup |xi' - 1|) on a 32 x degree grid.
inline double w1inf_distance(const CircleMap& map) {
    const std::size_t grid = std::max<std::size_t>(256, 32 * static_cast<std::size_t>(map.degree() + 1));
    const auto d = real_samples(map.displacement(), grid);
    const auto dp = real_samples(map.displacement_derivative(), grid);
    double m = 0.0;
    for (std::size_t j = 0; j < grid; ++j)
        m = std::max({m, std::abs(d[j]), std::abs(dp[j])});
    return m;
}

} // namespace disktomo
