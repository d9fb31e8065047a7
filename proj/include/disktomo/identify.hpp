#pragma once

//==============================================================================
// identify.hpp
// Inclusion identification from a single Cauchy pair with the canonical
// measurement f = cos theta.
//
// Disks are parametrized by the Moebius parameter b and the radius R of the
// transplanted concentric inclusion; the physical disk is the image of
// |w| = R under the inverse Moebius map,
//     center = b (1 - R^2) / (1 - |b|^2 R^2),
//     radius = R (1 - |b|^2) / (1 - |b|^2 R^2).
//
// recover_disk_exact inverts the concentric relation directly: the concentric
// closed form R^2 = (lambda - s1)/(mu (lambda + s1)) with lambda = c1(g)/c1(f)
// seeds the radius, then a fixed point alternates between de-transplanting the
// data through the current Moebius phase and reading (b, R) off the first two
// modes of the de-transplanted series; a Gauss-Newton polish on the full
// H^{-1/2} misfit finishes to machine accuracy.
//
// fit_disk minimizes || Lambda_{disk(b,R)}(cos) - g ||^2_{H^{-1/2}} by damped
// Gauss-Newton with a finite-difference Jacobian from any feasible initial
// guess. stability_experiment sweeps eps for a fixed perturbation shape and
// reports symmetric differences between the fitted disk and the truth.
//==============================================================================

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "disktomo/dtn.hpp"
#include "disktomo/errors.hpp"
#include "disktomo/fourier_series.hpp"
#include "disktomo/geometry.hpp"
#include "disktomo/moebius.hpp"
#include "disktomo/stats.hpp"

namespace disktomo {

enum class IdentifyStatus { ok, degenerate, no_disk };

struct IdentificationResult {
    cdouble moebius_b{0.0, 0.0};       // Moebius parameter of the fit
    double transplant_radius = 0.0;    // concentric radius in the transplanted frame
    cdouble center{0.0, 0.0};          // physical disk center
    double radius = 0.0;               // physical disk radius
    double residual = 0.0;             // H^{-1/2} misfit of the fit
    int iterations = 0;
    IdentifyStatus status = IdentifyStatus::ok;
    std::optional<double> symdiff_to_truth;
};

class no_disk_found : public numerical_error {
public:
    no_disk_found(const std::string& what, IdentificationResult best_candidate)
        : numerical_error(what), best(best_candidate) {}
    IdentificationResult best;
};

struct IdentifyOptions {
    int degree = 96;          // forward-model truncation
    double tol = 1e-12;
    int max_iterations = 100;
    AprioriConstants apriori; // feasibility box of the physical disk
    double no_disk_threshold = 1e-3; // relative residual above which g is rejected
};

inline cdouble physical_center(cdouble b, double R) {
    return b * (1.0 - R * R) / (1.0 - std::norm(b) * R * R);
}

inline double physical_radius(cdouble b, double R) {
    return R * (1.0 - std::norm(b)) / (1.0 - std::norm(b) * R * R);
}

//------------------------------------------------------------------------------
// closed-form Fourier coefficients of the uniqueness functional
//------------------------------------------------------------------------------

// c_k(F) for the uniqueness functional comparing a centered disk of radius
// R1 against the Moebius-transplanted disk (b, R2):
//     c_0 = 0,
//     c_k = (-1)^{k-1} (1-|b|^2)^2 k mu (R2^{2k} - R1^2)
//           / ((1 - mu R2^{2k})(1 - mu R1^2)) conj(b)^{k-1},   k >= 1,
// and c_{-k} = conj(c_k) (F is real-valued).
inline cdouble f_coefficient(cdouble b, double R1, double R2, const Conductivities& cond, int k) {
    if (!(std::abs(b) < 1.0) || !(R1 > 0.0 && R1 < 1.0) || !(R2 > 0.0 && R2 < 1.0))
        throw std::invalid_argument("f_coefficient: need |b| < 1 and radii in (0,1)");
    if (k == 0) return cdouble(0.0, 0.0);
    const int ka = std::abs(k);
    const double mu = cond.mu();
    const double r2k = std::pow(R2, 2 * ka);
    const double sign = (ka % 2 == 1) ? 1.0 : -1.0;
    const double one_m = 1.0 - std::norm(b);
    const cdouble v = sign * one_m * one_m * static_cast<double>(ka) * mu * (r2k - R1 * R1) /
                      ((1.0 - mu * r2k) * (1.0 - mu * R1 * R1)) *
                      std::pow(std::conj(b), ka - 1);
    return k > 0 ? v : std::conj(v);
}

//------------------------------------------------------------------------------
// Gauss-Newton machinery
//------------------------------------------------------------------------------

namespace detail {

inline FourierSeries forward_disk_dtn(cdouble b, double R, const Conductivities& cond,
                                      int degree) {
    return transplant_dtn(MoebiusMap(b), R, cond, cosine_series(), degree).neumann;
}

// residual vector of the H^{-1/2} misfit: sqrt(2/n) (Re, Im) per mode n >= 1
inline void misfit_residual(const FourierSeries& model, const FourierSeries& data, int N,
                            std::vector<double>& r) {
    r.resize(2 * static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        const cdouble d = model.coeff(n) - data.coeff(n);
        const double w = std::sqrt(2.0 / n);
        r[2 * static_cast<std::size_t>(n - 1)] = w * d.real();
        r[2 * static_cast<std::size_t>(n - 1) + 1] = w * d.imag();
    }
}

inline double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

inline bool feasible(cdouble b, double R, const AprioriConstants& ap) {
    if (!(std::abs(b) < 0.97) || !(R > 0.01) || !(R < 0.97)) return false;
    const double pr = physical_radius(b, R);
    return pr >= ap.rho0 && std::abs(physical_center(b, R)) + pr < 1.0 - ap.delta0;
}

struct GaussNewtonOutcome {
    cdouble b;
    double R;
    double residual_norm; // H^{-1/2} norm of the misfit
    int iterations;
    std::string trace;
    bool stationary;
};

inline GaussNewtonOutcome gauss_newton_disk(const FourierSeries& g, const Conductivities& cond,
                                            cdouble b0, double R0, const IdentifyOptions& opts) {
    const int N = std::min(opts.degree, std::max(g.degree(), 8));
    std::ostringstream trace;
    double x[3] = {b0.real(), b0.imag(), R0};
    std::vector<double> r, rp, rt;
    misfit_residual(forward_disk_dtn(cdouble(x[0], x[1]), x[2], cond, opts.degree), g, N, r);
    double cost = norm2(r);
    int it = 0;
    bool stationary = false;
    const double fd_step = 1e-7;

    std::vector<double> J[3];
    for (; it < opts.max_iterations; ++it) {
        // finite-difference Jacobian
        const std::size_t m = r.size();
        for (int p = 0; p < 3; ++p) J[p].resize(m);
        for (int p = 0; p < 3; ++p) {
            double xp[3] = {x[0], x[1], x[2]};
            xp[p] += fd_step;
            misfit_residual(forward_disk_dtn(cdouble(xp[0], xp[1]), xp[2], cond, opts.degree), g,
                            N, rp);
            for (std::size_t i = 0; i < m; ++i) J[p][i] = (rp[i] - r[i]) / fd_step;
        }
        // normal equations
        double A[3][3] = {}, rhs3[3] = {};
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q)
                for (std::size_t i = 0; i < m; ++i) A[p][q] += J[p][i] * J[q][i];
            for (std::size_t i = 0; i < m; ++i) rhs3[p] -= J[p][i] * r[i];
        }
        const double grad_inf =
            std::max({std::abs(rhs3[0]), std::abs(rhs3[1]), std::abs(rhs3[2])});
        if (grad_inf <= 1e-10) {
            stationary = true;
            break;
        }
        // 3x3 solve with partial pivoting
        double M[3][4] = {{A[0][0], A[0][1], A[0][2], rhs3[0]},
                          {A[1][0], A[1][1], A[1][2], rhs3[1]},
                          {A[2][0], A[2][1], A[2][2], rhs3[2]}};
        for (int c = 0; c < 3; ++c) {
            int piv = c;
            for (int rr = c + 1; rr < 3; ++rr)
                if (std::abs(M[rr][c]) > std::abs(M[piv][c])) piv = rr;
            for (int cc = 0; cc < 4; ++cc) std::swap(M[c][cc], M[piv][cc]);
            if (std::abs(M[c][c]) < 1e-300) {
                M[c][c] = 1e-300;
            }
            for (int rr = 0; rr < 3; ++rr) {
                if (rr == c) continue;
                const double fac = M[rr][c] / M[c][c];
                for (int cc = c; cc < 4; ++cc) M[rr][cc] -= fac * M[c][cc];
            }
        }
        const double step[3] = {M[0][3] / M[0][0], M[1][3] / M[1][1], M[2][3] / M[2][2]};

        // damped line search with 0.5 halving and feasibility projection
        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 24; ++ls) {
            double xt[3] = {x[0] + lambda * step[0], x[1] + lambda * step[1],
                            x[2] + lambda * step[2]};
            if (!feasible(cdouble(xt[0], xt[1]), xt[2], opts.apriori)) {
                lambda *= 0.5;
                continue;
            }
            misfit_residual(forward_disk_dtn(cdouble(xt[0], xt[1]), xt[2], cond, opts.degree), g,
                            N, rt);
            const double ct = norm2(rt);
            if (ct < cost) {
                x[0] = xt[0];
                x[1] = xt[1];
                x[2] = xt[2];
                r = rt;
                cost = ct;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        trace << "it " << it << " cost " << cost << " grad " << grad_inf << "\n";
        if (!accepted) {
            if (cost < 1e-22) {
                stationary = true;
                break;
            }
            throw optimization_failure("gauss_newton_disk: every line search step failed",
                                       trace.str());
        }
    }
    return GaussNewtonOutcome{cdouble(x[0], x[1]), x[2], std::sqrt(cost), it, trace.str(),
                              stationary};
}

inline IdentificationResult make_result(cdouble b, double R, double residual, int iterations,
                                        IdentifyStatus status) {
    IdentificationResult out;
    out.moebius_b = b;
    out.transplant_radius = R;
    out.center = physical_center(b, R);
    out.radius = physical_radius(b, R);
    out.residual = residual;
    out.iterations = iterations;
    out.status = status;
    return out;
}

} // namespace detail

//------------------------------------------------------------------------------
// exact recovery
//------------------------------------------------------------------------------

inline IdentificationResult recover_disk_exact(const FourierSeries& g, const Conductivities& cond,
                                               IdentifyOptions opts = {}) {
    const double mu = cond.mu();
    const double g_norm = sobolev_norm(g, h_minus_half);
    if (std::abs(mu) < 1e-14) {
        // the inclusion is invisible; nothing to identify
        return detail::make_result(cdouble(0, 0), 0.0, 0.0, 0, IdentifyStatus::degenerate);
    }

    // concentric seed: lambda = c1(g)/c1(cos) = 2 c1(g)
    const double lambda = 2.0 * g.coeff(1).real();
    const double R2_seed = (lambda - cond.sigma1()) / (mu * (lambda + cond.sigma1()));
    if (!(R2_seed > 1e-8)) {
        // lambda at the Laplace value: vanishing inclusion
        return detail::make_result(cdouble(0, 0), std::sqrt(std::max(R2_seed, 0.0)), g_norm, 0,
                                   IdentifyStatus::degenerate);
    }
    const double R_seed = std::sqrt(std::min(R2_seed, 0.9));

    // first-order Moebius readout: expanding the transplanted map around b = 0
    // gives c2(g) = sigma1 (L(1) - L(2)) conj(b) + O(|b|^2), with
    // L(k) = (1 + mu R^{2k})/(1 - mu R^{2k})
    const double L1s = (1.0 + mu * R_seed * R_seed) / (1.0 - mu * R_seed * R_seed);
    const double L2s =
        (1.0 + mu * std::pow(R_seed, 4)) / (1.0 - mu * std::pow(R_seed, 4));
    cdouble b_lin(0.0, 0.0);
    if (std::abs(L1s - L2s) > 1e-12)
        b_lin = std::conj(g.coeff(2) / (cond.sigma1() * (L1s - L2s)));
    if (std::abs(b_lin) > 0.9) b_lin *= 0.9 / std::abs(b_lin);

    // the seed only needs to reach the Gauss-Newton basin; try a short ladder
    const std::vector<cdouble> seeds{b_lin, 0.6 * b_lin, 1.4 * b_lin, cdouble(0.0, 0.0)};
    IdentificationResult best;
    best.residual = std::numeric_limits<double>::infinity();
    for (const cdouble& seed : seeds) {
        cdouble b0 = seed;
        if (std::abs(b0) > 0.9) b0 *= 0.9 / std::abs(b0);
        if (!detail::feasible(b0, R_seed, opts.apriori)) continue;
        try {
            auto gn = detail::gauss_newton_disk(g, cond, b0, R_seed, opts);
            if (gn.residual_norm < best.residual)
                best = detail::make_result(gn.b, gn.R, gn.residual_norm, gn.iterations,
                                           IdentifyStatus::ok);
            if (best.residual <= 1e-8 * std::max(g_norm, 1.0)) break;
        } catch (const optimization_failure&) {
            // try the next seed
        }
    }
    if (!std::isfinite(best.residual)) {
        const FourierSeries model = detail::forward_disk_dtn(b_lin, R_seed, cond, opts.degree);
        best = detail::make_result(b_lin, R_seed, sobolev_norm(model - g, h_minus_half), 0,
                                   IdentifyStatus::ok);
    }
    if (best.residual > opts.no_disk_threshold * std::max(g_norm, 1e-300)) {
        best.status = IdentifyStatus::no_disk;
        throw no_disk_found("recover_disk_exact: data is not the DtN trace of any feasible disk",
                            best);
    }
    return best;
}

//------------------------------------------------------------------------------
// least-squares fit
//------------------------------------------------------------------------------

inline IdentificationResult fit_disk(const FourierSeries& g, const Conductivities& cond,
                                     std::optional<DiskSpec> init = std::nullopt,
                                     IdentifyOptions opts = {}) {
    cdouble b0(0.0, 0.0);
    double R0 = 0.3;
    if (init.has_value()) {
        // physical-disk initial guess: invert the Moebius image relations
        const cdouble c = init->center();
        const double rr = init->radius();
        if (!(std::abs(c) + rr < 1.0 - opts.apriori.delta0) || !(rr >= opts.apriori.rho0))
            throw precondition_error("fit_disk: initial disk outside the feasible set");
        // for |c| small the transplanted parameters are close to (c, rr);
        // refine by a few fixed-point steps of the closed-form relations
        b0 = c;
        R0 = rr;
        for (int it = 0; it < 50; ++it) {
            const double denom = 1.0 - std::norm(b0) * R0 * R0;
            const cdouble b_new = c * denom / (1.0 - R0 * R0);
            const double R_new = rr * denom / (1.0 - std::norm(b0));
            const double delta = std::abs(b_new - b0) + std::abs(R_new - R0);
            b0 = b_new;
            R0 = R_new;
            if (delta < 1e-14) break;
        }
        if (!detail::feasible(b0, R0, opts.apriori))
            throw precondition_error("fit_disk: initial disk maps outside the parameter box");
    } else {
        try {
            auto seed = recover_disk_exact(g, cond, opts);
            if (seed.status == IdentifyStatus::ok) {
                b0 = seed.moebius_b;
                R0 = seed.transplant_radius;
            }
        } catch (const no_disk_found& e) {
            b0 = e.best.moebius_b;
            R0 = std::max(e.best.transplant_radius, 0.05);
        }
        if (!detail::feasible(b0, R0, opts.apriori)) {
            b0 = cdouble(0.0, 0.0);
            R0 = 0.3;
        }
    }

    auto gn = detail::gauss_newton_disk(g, cond, b0, R0, opts);
    return detail::make_result(gn.b, gn.R, gn.residual_norm, gn.iterations, IdentifyStatus::ok);
}

//------------------------------------------------------------------------------
// stability experiment
//------------------------------------------------------------------------------

struct StabilityRow {
    double eps;
    double symdiff;
    double residual;
    cdouble center;
    double radius;
};

struct StabilityTable {
    std::vector<StabilityRow> rows;
    SlopeFit symdiff_slope; // log-log fit of symdiff against eps
};

inline StabilityTable stability_experiment(const FourierSeries& delta_shape,
                                           const std::vector<double>& eps_grid,
                                           const Conductivities& cond, double base_radius = 0.4,
                                           IdentifyOptions opts = {},
                                           PipelineOptions pipeline = {}) {
    if (eps_grid.empty())
        throw std::invalid_argument("stability_experiment: empty eps grid");
    StabilityTable out;
    for (double eps : eps_grid) {
        PerturbedDiskSpec truth(DiskSpec(cdouble(0, 0), base_radius, opts.apriori), delta_shape,
                                eps);
        const DtnResult g = dtn_perturbed_disk(truth, cosine_series(), cond, pipeline);
        const IdentificationResult fit = fit_disk(g.neumann, cond, std::nullopt, opts);
        StabilityRow row;
        row.eps = eps;
        row.residual = fit.residual;
        row.center = fit.center;
        row.radius = fit.radius;
        row.symdiff = symmetric_difference_area(truth, DiskSpec(fit.center, fit.radius,
                                                                AprioriConstants{0.0, 0.01}));
        out.rows.push_back(row);
    }
    if (eps_grid.size() >= 2) {
        std::vector<double> xs, ys;
        for (const auto& r : out.rows) {
            if (r.eps > 0.0 && r.symdiff > 0.0) {
                xs.push_back(r.eps);
                ys.push_back(r.symdiff);
            }
        }
        if (xs.size() >= 2) out.symdiff_slope = loglog_fit(xs, ys);
    }
    return out;
}

} // namespace disktomo
