#pragma once

//==============================================================================
// conformal.hpp
// Boundary correspondence functions for starlike domains.
//
// Simply connected (Theodorsen): the boundary correspondence phi of the
// conformal map of the unit disk onto the region bounded by r(phi)e^{i phi}
// solves the fixed-point equation
//     phi(theta) - theta = H( log r(phi(theta)) ),
// with H the conjugation operator on the circle. Unique solvability needs the
// delta-condition sup |r'/r| < 1.
//
// Doubly connected (Theodorsen-Garrick): for the annulus rho < |w| < 1 mapped
// onto the region between the unit circle and an inner starlike curve r1, the
// two correspondences and the conformal modulus solve
//     phi0(theta) - theta = -K_rho( log r1(phi1(theta)) ),
//     phi1(theta) - theta = -H_rho( log r1(phi1(theta)) ),
//     rho = exp( (1/2pi) \int log r1(phi1(theta)) dtheta ),
// where H_rho, K_rho are the annulus conjugation multipliers
//     H_rho: e^{im.} -> -i sgn(m) (1+rho^{2|m|})/(1-rho^{2|m|}) e^{im.},
//     K_rho: e^{im.} -> -2i sgn(m) rho^{|m|} /(1-rho^{2|m|}) e^{im.},
// both annihilating constants. As rho -> 0, H_rho reduces to the circle
// Hilbert transform and K_rho to zero, and the mean-zero normalization
// \int (phi_i - theta) = 0 holds automatically.
//
// The interface diffeomorphism of the transplanted transmission problem is
// xi = phi1^{-1} o phi_theodorsen on the inner circle; psi_e = phi0 is the
// outer boundary correspondence.
//==============================================================================

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "disktomo/circle_map.hpp"
#include "disktomo/errors.hpp"
#include "disktomo/fourier_series.hpp"
#include "disktomo/geometry.hpp"

namespace disktomo {

enum class AnnulusKind { H_rho, K_rho };

// Annulus conjugation operators as Fourier multipliers; rho = 0 degenerates
// to the circle case.
inline FourierSeries annulus_conjugation(const FourierSeries& f, double rho, AnnulusKind kind) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("annulus_conjugation: rho must lie in [0,1)");
    FourierSeries g(f.degree());
    for (int m = 1; m <= f.degree(); ++m) {
        const double r2m = std::pow(rho, 2 * m);
        double gain;
        if (kind == AnnulusKind::H_rho)
            gain = (1.0 + r2m) / (1.0 - r2m);
        else
            gain = 2.0 * std::pow(rho, m) / (1.0 - r2m);
        g.set_coeff(m, cdouble(0.0, -gain) * f.coeff(m));
        g.set_coeff(-m, cdouble(0.0, gain) * f.coeff(-m));
    }
    return g;
}

struct SolverOptions {
    double tol = 1e-12;
    int max_iter = 200;
    std::size_t grid = 0; // 0: choose from the delta degree
};

namespace detail {

inline std::size_t conformal_grid(const FourierSeries& delta, std::size_t requested) {
    if (requested != 0) return requested;
    return std::max<std::size_t>(
        512, next_pow2(16 * static_cast<std::size_t>(delta.degree() + 1)));
}

inline void require_delta_condition(const PerturbedDiskSpec& spec, const char* who) {
    const double dc = delta_condition(spec);
    if (!(dc < 1.0))
        throw precondition_error(std::string(who) + ": delta-condition " + std::to_string(dc) +
                                 " >= 1, boundary too far from a circle");
}

} // namespace detail

//------------------------------------------------------------------------------
// Theodorsen
//------------------------------------------------------------------------------

inline CircleMap theodorsen_solve(const PerturbedDiskSpec& boundary, SolverOptions opts = {}) {
    detail::require_delta_condition(boundary, "theodorsen_solve");
    const std::size_t S = detail::conformal_grid(boundary.delta(), opts.grid);

    std::vector<double> theta(S), phi(S), logr(S);
    for (std::size_t j = 0; j < S; ++j)
        theta[j] = two_pi * static_cast<double>(j) / static_cast<double>(S);
    phi = theta;

    double lambda = 1.0;
    double prev_residual = std::numeric_limits<double>::infinity();
    double residual = prev_residual;
    for (int it = 0; it < opts.max_iter; ++it) {
        for (std::size_t j = 0; j < S; ++j)
            logr[j] = std::log(boundary.polar_radius(phi[j]));
        const auto conj_samples = real_samples(hilbert_transform(from_samples(logr)), S);
        residual = 0.0;
        for (std::size_t j = 0; j < S; ++j)
            residual = std::max(residual, std::abs(phi[j] - theta[j] - conj_samples[j]));
        if (residual < opts.tol) {
            std::vector<double> disp(S);
            for (std::size_t j = 0; j < S; ++j) disp[j] = phi[j] - theta[j];
            return CircleMap::from_displacement_samples(disp, 1e-15);
        }
        if (residual > prev_residual) lambda = 0.5;
        prev_residual = residual;
        for (std::size_t j = 0; j < S; ++j)
            phi[j] += lambda * (theta[j] + conj_samples[j] - phi[j]);
    }
    throw divergence_error("theodorsen_solve: no convergence in max_iter", residual);
}

inline CircleMap theodorsen_solve(double radius, const FourierSeries& delta, double eps,
                                  SolverOptions opts = {}) {
    return theodorsen_solve(PerturbedDiskSpec::profile(radius, delta, eps), opts);
}

//------------------------------------------------------------------------------
// Theodorsen-Garrick
//------------------------------------------------------------------------------

struct GarrickResult {
    double rho = 0.0;       // conformal modulus
    CircleMap outer_map;    // phi0, the outer boundary correspondence
    CircleMap inner_map;    // phi1, the inner boundary correspondence
    double residual = 0.0;
    int iterations = 0;
};

// Outer boundary is the unit circle (log r0 = 0); the inner starlike boundary
// comes from the inclusion's polar radius.
inline GarrickResult garrick_solve(const PerturbedDiskSpec& inner, SolverOptions opts = {}) {
    detail::require_delta_condition(inner, "garrick_solve");
    const std::size_t S = detail::conformal_grid(inner.delta(), opts.grid);

    std::vector<double> theta(S), phi1(S), logr(S);
    for (std::size_t j = 0; j < S; ++j)
        theta[j] = two_pi * static_cast<double>(j) / static_cast<double>(S);
    phi1 = theta;

    double rho = inner.base_radius();
    double lambda = 1.0;
    double prev_residual = std::numeric_limits<double>::infinity();
    double residual = prev_residual;
    for (int it = 0; it < opts.max_iter; ++it) {
        for (std::size_t j = 0; j < S; ++j)
            logr[j] = std::log(inner.polar_radius(phi1[j]));
        const auto s_hat = from_samples(logr);
        rho = std::exp(s_hat.coeff(0).real());
        const auto conj_samples =
            real_samples(annulus_conjugation(s_hat, rho, AnnulusKind::H_rho), S);
        residual = 0.0;
        for (std::size_t j = 0; j < S; ++j)
            residual = std::max(residual, std::abs(phi1[j] - theta[j] + conj_samples[j]));
        if (residual < opts.tol) {
            GarrickResult out;
            out.rho = rho;
            out.residual = residual;
            out.iterations = it;
            std::vector<double> disp(S);
            for (std::size_t j = 0; j < S; ++j) disp[j] = phi1[j] - theta[j];
            out.inner_map = CircleMap::from_displacement_samples(disp, 1e-15);
            const auto outer_samples =
                real_samples(annulus_conjugation(s_hat, rho, AnnulusKind::K_rho), S);
            for (std::size_t j = 0; j < S; ++j) disp[j] = -outer_samples[j];
            out.outer_map = CircleMap::from_displacement_samples(disp, 1e-15);
            return out;
        }
        if (residual > prev_residual) lambda = 0.5;
        prev_residual = residual;
        for (std::size_t j = 0; j < S; ++j)
            phi1[j] += lambda * (theta[j] - conj_samples[j] - phi1[j]);
    }
    throw divergence_error("garrick_solve: no convergence in max_iter", residual);
}

inline GarrickResult garrick_solve(double radius, const FourierSeries& delta, double eps,
                                   SolverOptions opts = {}) {
    return garrick_solve(PerturbedDiskSpec::profile(radius, delta, eps), opts);
}

//------------------------------------------------------------------------------
// interface diffeomorphism
//------------------------------------------------------------------------------

struct InterfaceMapResult {
    CircleMap xi;       // (phi^e)^{-1} o phi^i on the inner circle
    double rho = 0.0;   // conformal modulus of the exterior annulus
    CircleMap psi_e;    // outer boundary correspondence (Garrick phi0)
    CircleMap phi_i;    // Theodorsen correspondence of the interior map
    CircleMap phi_e;    // Garrick inner correspondence phi1
    double xi_w1inf = 0.0; // diagnostic ||xi - I||_{W^{1,inf}}
};

inline InterfaceMapResult interface_map(const PerturbedDiskSpec& inclusion,
                                        SolverOptions opts = {}) {
    InterfaceMapResult out;
    out.phi_i = theodorsen_solve(inclusion, opts);
    GarrickResult g = garrick_solve(inclusion, opts);
    out.rho = g.rho;
    out.psi_e = g.outer_map;
    out.phi_e = g.inner_map;
    out.xi = compose_maps(invert_circle_map(g.inner_map, opts.tol), out.phi_i);
    out.xi_w1inf = w1inf_distance(out.xi);
    return out;
}

} // namespace disktomo
