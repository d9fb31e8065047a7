#pragma once

//==============================================================================
// moebius.hpp
// Moebius automorphisms of the unit disk, w(z) = (z - b)/(1 - conj(b) z) with
// |b| < 1, and everything the identification layer needs from them:
//   - the boundary phase correspondence phi and its inverse (both computed
//     from complex arguments, which is quadrant-safe),
//   - the radial derivative factor d_r rho(1,theta),
//   - closed-form Fourier coefficients of the pulled-back boundary functions
//     cos o phi^{-1}, e^{i phi^{-1}}, e^{2i phi^{-1}},
//   - the DtN transplant for an off-center disk inclusion,
//         Lambda_D(f)(theta) = d_r rho(1,theta) [Lambda_C^{R}(f o phi^{-1})](phi(theta)).
//==============================================================================

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "disktomo/circle_map.hpp"
#include "disktomo/dtn.hpp"
#include "disktomo/fourier_series.hpp"

namespace disktomo {

class MoebiusMap {
public:
    explicit MoebiusMap(cdouble b) : b_(b) {
        if (!(std::abs(b) < 1.0)) throw std::invalid_argument("MoebiusMap: |b| must be < 1");
    }
    cdouble b() const { return b_; }

private:
    cdouble b_;
};

inline cdouble moebius_forward(const MoebiusMap& map, cdouble z) {
    if (std::abs(z) > 1.0 + 1e-12)
        throw std::invalid_argument("moebius_forward: point outside the closed disk");
    return (z - map.b()) / (1.0 - std::conj(map.b()) * z);
}

// Displacement of the boundary phase: arg(w(e^{i theta}) e^{-i theta}).
// With zeta = 1 - conj(b) e^{i theta}, the ratio is conj(zeta)/zeta, so the
// displacement is -2 arg(zeta); Re zeta >= 1 - |b| > 0 keeps the principal
// branch away from the cut.
inline double moebius_phase_displacement(const MoebiusMap& map, double theta) {
    const cdouble zeta = 1.0 - std::conj(map.b()) * cdouble(std::cos(theta), std::sin(theta));
    return -2.0 * std::arg(zeta);
}

inline double moebius_phase_derivative(const MoebiusMap& map, double theta) {
    const double b2 = std::norm(map.b());
    const double re = (std::conj(map.b()) * cdouble(std::cos(theta), std::sin(theta))).real();
    return (1.0 - b2) / (1.0 + b2 - 2.0 * re);
}

// d_r rho(1, theta) = (1 - |b|^2)/(1 + |b|^2 - 2 Re(conj(b) e^{i theta})).
// On the boundary this coincides with |w'(e^{i theta})| = phi'(theta).
inline double radial_derivative_factor(const MoebiusMap& map, double theta) {
    return moebius_phase_derivative(map, theta);
}

struct BoundaryPhase {
    CircleMap map;     // phi
    CircleMap inverse; // phi^{-1}, the boundary phase of the map with -b
};

namespace detail {

inline CircleMap moebius_phase_circle_map(const MoebiusMap& map) {
    const double ab = std::abs(map.b());
    // coefficient decay |b|^k: pick the grid so the discarded tail is below
    // machine precision
    int k_tail = 64;
    if (ab > 0.05) k_tail = static_cast<int>(std::ceil(std::log(1e-17) / std::log(ab))) + 8;
    const std::size_t S = next_pow2(std::max(256, 4 * k_tail));
    std::vector<double> disp(S);
    for (std::size_t j = 0; j < S; ++j)
        disp[j] = moebius_phase_displacement(map, two_pi * static_cast<double>(j) / static_cast<double>(S));
    return CircleMap::from_displacement_samples(disp, 1e-15);
}

} // namespace detail

inline BoundaryPhase boundary_phase(const MoebiusMap& map) {
    return BoundaryPhase{detail::moebius_phase_circle_map(map),
                         detail::moebius_phase_circle_map(MoebiusMap(-map.b()))};
}

//------------------------------------------------------------------------------
// closed-form pullback coefficients
//------------------------------------------------------------------------------

enum class PullbackKind { cos_phi_inverse, exp_i_phi_inverse, exp_2i_phi_inverse };

// Fourier coefficients of the three pulled-back boundary functions. From
//   e^{i phi^{-1}(theta)} = (e^{i theta} + b)/(1 + conj(b) e^{i theta})
//                         = b + (1-|b|^2) sum_{j>=1} (-conj(b))^{j-1} e^{ij theta}:
//   c_k(e^{i phi^{-1}})  = b at k=0, (1-|b|^2)(-conj(b))^{k-1} for k>0, 0 for k<0;
//   c_k(e^{2i phi^{-1}}) = b^2 at k=0, 2b(1-|b|^2) at k=1,
//                          (-conj(b))^{k-2}(1-|b|^2)[k-1-(k+1)|b|^2] for k>=2;
//   cos o phi^{-1} = (e^{i phi^{-1}} + conj(e^{i phi^{-1}}))/2 (real function).
inline cdouble pullback_coefficient(const MoebiusMap& map, PullbackKind kind, int k) {
    const cdouble b = map.b();
    const double one_m = 1.0 - std::norm(b);
    const cdouble mbbar = -std::conj(b);

    auto exp_i = [&](int kk) -> cdouble {
        if (kk < 0) return cdouble(0.0, 0.0);
        if (kk == 0) return b;
        return one_m * std::pow(mbbar, kk - 1);
    };
    auto exp_2i = [&](int kk) -> cdouble {
        if (kk < 0) return cdouble(0.0, 0.0);
        if (kk == 0) return b * b;
        if (kk == 1) return 2.0 * b * one_m;
        return std::pow(mbbar, kk - 2) * one_m *
               (static_cast<double>(kk - 1) - static_cast<double>(kk + 1) * std::norm(b));
    };

    switch (kind) {
    case PullbackKind::exp_i_phi_inverse:
        return exp_i(k);
    case PullbackKind::exp_2i_phi_inverse:
        return exp_2i(k);
    case PullbackKind::cos_phi_inverse:
        if (k == 0) return cdouble(b.real(), 0.0);
        if (k > 0) return 0.5 * exp_i(k);
        return std::conj(0.5 * exp_i(-k));
    }
    throw std::invalid_argument("pullback_coefficient: unknown kind");
}

//------------------------------------------------------------------------------
// DtN transplant for off-center disks
//------------------------------------------------------------------------------

// Dirichlet-to-Neumann map of the disk inclusion w^{-1}(B_{R2}) (i.e. the
// concentric disk of radius R2 pulled back through the Moebius map with
// parameter b):
//     Lambda(f)(theta) = d_r rho(1,theta) [Lambda_C^{R2}(f o phi^{-1})](phi(theta)).
// b = 0 reduces exactly to the concentric multiplier.
inline DtnResult transplant_dtn(const MoebiusMap& map, double R2, const Conductivities& cond,
                                const FourierSeries& f, int degree = 128) {
    if (!(R2 > 0.0 && R2 < 1.0))
        throw std::invalid_argument("transplant_dtn: inclusion radius must lie in (0,1)");
    const BoundaryPhase phase = boundary_phase(map);

    const FourierSeries fpull = compose_with_target(f, phase.inverse, degree);
    const DtnResult concentric = concentric_dtn(fpull, R2, cond);

    const std::size_t S = detail::next_pow2(
        std::max<std::size_t>(2 * static_cast<std::size_t>(degree) + 2,
                              2 * static_cast<std::size_t>(degree + phase.map.degree())));
    std::vector<cdouble> vals(S);
    for (std::size_t j = 0; j < S; ++j) {
        const double theta = two_pi * static_cast<double>(j) / static_cast<double>(S);
        vals[j] = radial_derivative_factor(map, theta) *
                  evaluate(concentric.neumann, phase.map.xi(theta));
    }
    FourierSeries g = truncated(from_samples(vals), degree);
    return DtnResult{std::move(g), DtnMeta{"transplant-moebius", R2, 0.0, 0, 0.0, 0.0}};
}

} // namespace disktomo
