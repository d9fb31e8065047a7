#pragma once

//==============================================================================
// geometry.hpp
// Inclusion geometry for the unit-disk conductivity problem: disks, starlike
// eps-perturbations of centered disks with polar radius
//     r(theta) = R - eps * delta(theta),
// the delta-condition sup |r'/r| required by the Theodorsen solver, and
// symmetric-difference areas (the stability metric).
//==============================================================================

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>

#include "disktomo/errors.hpp"
#include "disktomo/fourier_series.hpp"

namespace disktomo {

// A-priori constants of the admissible class: inclusions stay delta0 away
// from the outer boundary and have radius at least rho0.
struct AprioriConstants {
    double delta0 = 0.1;
    double rho0 = 0.1;
};

class DiskSpec {
public:
    DiskSpec(cdouble center, double radius, AprioriConstants apriori = {})
        : center_(center), radius_(radius), apriori_(apriori) {
        if (!(radius >= apriori.rho0))
            throw std::invalid_argument("DiskSpec: radius below the a-priori minimum rho0");
        if (!(std::abs(center) + radius < 1.0 - apriori.delta0))
            throw std::invalid_argument("DiskSpec: disk not compactly inside Omega_0");
    }

    cdouble center() const { return center_; }
    double radius() const { return radius_; }
    const AprioriConstants& apriori() const { return apriori_; }

private:
    cdouble center_;
    double radius_;
    AprioriConstants apriori_;
};

// eps-perturbation of a centered disk. Off-center perturbed disks are handled
// as (Moebius shift, centered spec) pairs by the callers, so the base center
// is pinned to the origin here.
class PerturbedDiskSpec {
public:
    PerturbedDiskSpec(DiskSpec base, FourierSeries delta, double eps)
        : base_(base), delta_(std::move(delta)), eps_(eps) {
        validate();
    }

    // Bench constructor: radius profile without the Omega_0 inclusion gate
    // (the conformal solvers only need positivity and the delta-condition).
    static PerturbedDiskSpec profile(double radius, FourierSeries delta, double eps) {
        return PerturbedDiskSpec(radius, std::move(delta), eps);
    }

    // Normal-offset input x + eps*deltan(x)nu(x): first-order identification
    // with the polar form gives delta_polar = -delta_normal.
    static PerturbedDiskSpec from_normal_offset(DiskSpec base, const FourierSeries& delta_normal,
                                                double eps) {
        return PerturbedDiskSpec(base, -1.0 * delta_normal, eps);
    }

    const DiskSpec& base() const { return *base_; }
    double base_radius() const { return radius_; }
    const FourierSeries& delta() const { return delta_; }
    double eps() const { return eps_; }

    double polar_radius(double theta) const {
        return radius_ - eps_ * evaluate(delta_, theta).real();
    }

    double min_polar_radius() const { return min_radius_; }

    // Upper bound for ||delta||_{C^2} from the coefficients.
    double c2_norm_estimate() const {
        double acc = 0.0;
        for (int n = -delta_.degree(); n <= delta_.degree(); ++n)
            acc += (1.0 + std::abs(n) + static_cast<double>(n) * n) * std::abs(delta_.coeff(n));
        return acc;
    }

    // Class membership check: C^2 bound below one and positive radius. Shapes
    // failing only the C^2 normalization can be rescaled with class_form().
    bool in_class() const { return c2_norm_estimate() < 1.0 && min_radius_ > 0.0; }

    // Same geometric set, delta rescaled to land just inside the C^2 gate and
    // eps absorbing the factor.
    PerturbedDiskSpec class_form() const {
        const double c = c2_norm_estimate();
        if (c == 0.0) return *this;
        const double k = (1.0 - 1e-12) / c;
        PerturbedDiskSpec out = *this;
        out.delta_ = k * delta_;
        out.eps_ = eps_ / k;
        return out;
    }

private:
    PerturbedDiskSpec(double radius, FourierSeries delta, double eps)
        : base_(std::nullopt), delta_(std::move(delta)), eps_(eps), radius_(radius) {
        validate();
    }

    void validate() {
        if (base_) radius_ = base_->radius();
        if (eps_ < 0.0) throw std::invalid_argument("PerturbedDiskSpec: eps must be >= 0");
        if (!delta_.is_real(1e-9 * std::max(1.0, delta_.max_abs_coeff())))
            throw std::invalid_argument("PerturbedDiskSpec: delta must be a real series");
        const std::size_t grid =
            std::max<std::size_t>(256, 32 * static_cast<std::size_t>(delta_.degree() + 1));
        const auto d = real_samples(delta_, grid);
        min_radius_ = radius_;
        for (std::size_t j = 0; j < grid; ++j)
            min_radius_ = std::min(min_radius_, radius_ - eps_ * d[j]);
        if (!(min_radius_ > 0.0))
            throw std::invalid_argument("PerturbedDiskSpec: polar radius is not positive");
    }

    std::optional<DiskSpec> base_;
    FourierSeries delta_;
    double eps_;
    double radius_ = 0.0;
    double min_radius_ = 0.0;
};

inline double polar_radius(const PerturbedDiskSpec& spec, double theta) {
    return spec.polar_radius(theta);
}

// sup_theta |r'(theta)/r(theta)| on a dense grid (>= 32x the delta degree);
// the Theodorsen iteration needs this below one.
inline double delta_condition(const PerturbedDiskSpec& spec) {
    const std::size_t grid =
        std::max<std::size_t>(256, 32 * static_cast<std::size_t>(spec.delta().degree() + 1));
    const auto d = real_samples(spec.delta(), grid);
    const auto dp = real_samples(derivative(spec.delta()), grid);
    double sup = 0.0;
    for (std::size_t j = 0; j < grid; ++j) {
        const double r = spec.base_radius() - spec.eps() * d[j];
        sup = std::max(sup, std::abs(spec.eps() * dp[j]) / r);
    }
    return sup;
}

//------------------------------------------------------------------------------
// symmetric differences
//------------------------------------------------------------------------------

namespace detail {

// polar radius of a (possibly off-center) disk seen from the origin; only
// defined when the origin is inside, i.e. |b| < R
inline double disk_polar_radius(cdouble b, double R, double theta) {
    const double c = (std::conj(b) * cdouble(std::cos(theta), std::sin(theta))).real();
    const double disc = c * c + R * R - std::norm(b);
    return c + std::sqrt(disc);
}

inline double radial_symmetric_difference(const std::function<double(double)>& ra,
                                          const std::function<double(double)>& rb,
                                          std::size_t nodes) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double t = two_pi * static_cast<double>(j) / static_cast<double>(nodes);
        const double a = ra(t), b = rb(t);
        acc += std::abs(a * a - b * b);
    }
    return 0.5 * acc * two_pi / static_cast<double>(nodes);
}

} // namespace detail

// |A delta B| for two true disks: closed-form lens overlap.
inline double symmetric_difference_area(const DiskSpec& a, const DiskSpec& b) {
    const double ra = a.radius(), rb = b.radius();
    const double area = pi_const * (ra * ra + rb * rb);
    const double d = std::abs(a.center() - b.center());
    if (d >= ra + rb) return area;                                // disjoint
    if (d <= std::abs(ra - rb)) return std::abs(pi_const * (ra * ra - rb * rb)); // nested
    const double ia = ra * ra * std::acos((d * d + ra * ra - rb * rb) / (2.0 * d * ra)) +
                      rb * rb * std::acos((d * d + rb * rb - ra * ra) / (2.0 * d * rb)) -
                      0.5 * std::sqrt((-d + ra + rb) * (d + ra - rb) * (d - ra + rb) * (d + ra + rb));
    return area - 2.0 * ia;
}

// Starlike-vs-starlike via (1/2) \int |r_A^2 - r_B^2|; disks must contain the
// origin to be starlike with respect to it.
inline double symmetric_difference_area(const PerturbedDiskSpec& a, const PerturbedDiskSpec& b,
                                        std::size_t nodes = 8192) {
    return detail::radial_symmetric_difference(
        [&](double t) { return a.polar_radius(t); }, [&](double t) { return b.polar_radius(t); },
        nodes);
}

inline double symmetric_difference_area(const PerturbedDiskSpec& a, const DiskSpec& b,
                                        std::size_t nodes = 8192) {
    if (!(std::abs(b.center()) < b.radius()))
        throw unsupported_geometry(
            "symmetric_difference_area: disk is not star-shaped with respect to the origin");
    return detail::radial_symmetric_difference(
        [&](double t) { return a.polar_radius(t); },
        [&](double t) { return detail::disk_polar_radius(b.center(), b.radius(), t); }, nodes);
}

inline double symmetric_difference_area(const DiskSpec& a, const PerturbedDiskSpec& b,
                                        std::size_t nodes = 8192) {
    return symmetric_difference_area(b, a, nodes);
}

} // namespace disktomo
