#pragma once

//==============================================================================
// oracle.hpp
// Independent finite-difference reference solver for the transmission problem
//     div( (sigma1 + (sigma2 - sigma1) chi_D) grad u ) = 0 in the unit disk,
//     u = f on the boundary,
// used to cross-validate the spectral DtN pipelines.
//
// Discretization: flux-conservative vertex-centered finite differences on a
// polar grid (n_r radial cells, n_theta angular cells),
//     0 = [r sigma u_r]_{i-1/2}^{i+1/2} dtheta + [sigma u_theta / r]_{j-1/2}^{j+1/2} dr,
// with harmonic integral averaging of sigma along each face segment (the
// crossing fraction is located by bisection, which makes the radial averaging
// flux-exact for radius-aligned interfaces). The pole is one shared unknown
// coupled to the first ring; the outer boundary r = 1 is a grid line, so the
// Dirichlet data enters exactly. The matrix is symmetric positive definite
// and solved by preconditioned conjugate gradients (Eigen).
//
// Neumann extraction: one-sided second-order differences along the radial
// grid lines, g_j = sigma1 (3 f_j - 4 u_{N-1,j} + u_{N-2,j})/(2 dr), then one
// transform back to coefficients. No interpolation is involved.
//==============================================================================

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "disktomo/dtn.hpp"
#include "disktomo/errors.hpp"
#include "disktomo/fourier_series.hpp"
#include "disktomo/geometry.hpp"

namespace disktomo {

struct OracleOptions {
    int grid_size = 256;    // radial and angular cells
    double tol = 1e-10;     // relative CG residual
    int max_iterations = 0; // 0: Eigen default
    int boundary_angles = 256; // degree cap of the extracted Neumann series
    bool want_interface_trace = false;
};

struct GridSolution {
    int grid_size = 0;
    double dr = 0.0;
    double dtheta = 0.0;
    // nodal potential u[(i-1)*n_theta + j] at r = i dr, theta = j dtheta,
    // i = 1..n_r-1; the final entry is the pole value u(0)
    std::vector<double> u;
    FourierSeries neumann;
    std::optional<FourierSeries> interface_trace;
    double total_flux = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

using InclusionSpec = std::variant<DiskSpec, PerturbedDiskSpec>;

namespace detail {

inline bool inside_inclusion(const InclusionSpec& inc, double x, double y) {
    if (std::holds_alternative<DiskSpec>(inc)) {
        const auto& d = std::get<DiskSpec>(inc);
        const double dx = x - d.center().real(), dy = y - d.center().imag();
        return dx * dx + dy * dy < d.radius() * d.radius();
    }
    const auto& p = std::get<PerturbedDiskSpec>(inc);
    const double r = std::hypot(x, y);
    if (r == 0.0) return true;
    return r < p.polar_radius(std::atan2(y, x));
}

// Flux-conservative face conductivity: harmonic integral average of sigma
// along the segment, |seg| / \int ds/sigma. For segments the interface
// crosses this is the fraction-weighted harmonic mean, with the crossing
// located by bisection on the inside/outside predicate.
inline double face_sigma(const InclusionSpec& inc, const Conductivities& cond, double x0,
                         double y0, double x1, double y1) {
    const bool in0 = inside_inclusion(inc, x0, y0);
    const bool in1 = inside_inclusion(inc, x1, y1);
    const double s0 = in0 ? cond.sigma2() : cond.sigma1();
    const double s1 = in1 ? cond.sigma2() : cond.sigma1();
    if (in0 == in1) return s0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inside_inclusion(inc, x0 + mid * (x1 - x0), y0 + mid * (y1 - y0)) == in0)
            lo = mid;
        else
            hi = mid;
    }
    const double tc = 0.5 * (lo + hi);
    return 1.0 / (tc / s0 + (1.0 - tc) / s1);
}

// Angular faces extend radially over [r - dr/2, r + dr/2]: conductances in
// parallel, so the face value is the arithmetic integral average of sigma
// along that radial extent, evaluated at the face angle.
inline double face_sigma_angular(const InclusionSpec& inc, const Conductivities& cond,
                                 double theta_face, double r, double dr) {
    const double c = std::cos(theta_face), s = std::sin(theta_face);
    const double r0 = std::max(r - 0.5 * dr, 0.0), r1 = r + 0.5 * dr;
    const bool in0 = inside_inclusion(inc, r0 * c, r0 * s);
    const bool in1 = inside_inclusion(inc, r1 * c, r1 * s);
    const double s0 = in0 ? cond.sigma2() : cond.sigma1();
    const double s1 = in1 ? cond.sigma2() : cond.sigma1();
    if (in0 == in1) return s0;
    double lo = r0, hi = r1;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inside_inclusion(inc, mid * c, mid * s) == in0)
            lo = mid;
        else
            hi = mid;
    }
    const double tc = (0.5 * (lo + hi) - r0) / (r1 - r0);
    return tc * s0 + (1.0 - tc) * s1;
}

// cubic Lagrange interpolation of ring values along one radial line
inline double radial_interp(const std::vector<double>& u, int n_r, int n_theta, int j, double dr,
                            double pole, const std::vector<double>& boundary, double r) {
    auto value = [&](int i) -> double {
        if (i <= 0) return pole;
        if (i >= n_r) return boundary[static_cast<std::size_t>(j)];
        return u[static_cast<std::size_t>(i - 1) * n_theta + j];
    };
    int i0 = static_cast<int>(std::floor(r / dr)) - 1;
    i0 = std::max(0, std::min(n_r - 3, i0));
    const double t = r / dr - (i0 + 1);
    const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return w0 * value(i0) + w1 * value(i0 + 1) + w2 * value(i0 + 2) + w3 * value(i0 + 3);
}

} // namespace detail

inline GridSolution fd_solve(const InclusionSpec& inclusion, const Conductivities& cond,
                             const FourierSeries& f, OracleOptions opts = {}) {
    if (opts.grid_size < 64)
        throw std::invalid_argument("fd_solve: grid_size must be at least 64");
    const int n_r = opts.grid_size;
    const int n_t = opts.grid_size;
    const double dr = 1.0 / n_r;
    const double dt = two_pi / n_t;

    std::vector<double> boundary(static_cast<std::size_t>(n_t));
    for (int j = 0; j < n_t; ++j) boundary[static_cast<std::size_t>(j)] = evaluate(f, dt * j).real();

    const int unknowns = (n_r - 1) * n_t + 1;
    const int pole = unknowns - 1;
    auto idx = [n_t](int i, int j) { return (i - 1) * n_t + ((j % n_t + n_t) % n_t); };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(unknowns) * 5);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);

    std::vector<double> pole_coeff(static_cast<std::size_t>(n_t));
    double pole_diag = 0.0;

    for (int i = 1; i < n_r; ++i) {
        const double r = i * dr;
        const double r_out = (i + 0.5) * dr;
        const double r_in = (i - 0.5) * dr;
        for (int j = 0; j < n_t; ++j) {
            const double th = j * dt;
            const double c = std::cos(th), s = std::sin(th);
            const int k = idx(i, j);
            double diag = 0.0;

            // outward radial face
            {
                const double sf = detail::face_sigma(inclusion, cond, r * c, r * s,
                                                     (r + dr) * c, (r + dr) * s);
                const double w = sf * r_out * dt / dr;
                diag += w;
                if (i + 1 < n_r)
                    trip.emplace_back(k, idx(i + 1, j), -w);
                else
                    rhs[k] += w * boundary[static_cast<std::size_t>(j)];
            }
            // inward radial face
            {
                const double sf = detail::face_sigma(inclusion, cond, (r - dr) * c, (r - dr) * s,
                                                     r * c, r * s);
                const double w = sf * r_in * dt / dr;
                diag += w;
                if (i - 1 >= 1) {
                    trip.emplace_back(k, idx(i - 1, j), -w);
                } else {
                    trip.emplace_back(k, pole, -w);
                    pole_coeff[static_cast<std::size_t>(j)] = w;
                    pole_diag += w;
                }
            }
            // angular faces
            for (int d : {1, -1}) {
                const double th_face = (j + 0.5 * d) * dt;
                const double sf = detail::face_sigma_angular(inclusion, cond, th_face, r, dr);
                const double w = sf * dr / (r * dt);
                diag += w;
                trip.emplace_back(k, idx(i, j + d), -w);
            }
            trip.emplace_back(k, k, diag);
        }
    }
    for (int j = 0; j < n_t; ++j)
        trip.emplace_back(pole, idx(1, j), -pole_coeff[static_cast<std::size_t>(j)]);
    trip.emplace_back(pole, pole, pole_diag);

    Eigen::SparseMatrix<double> A(unknowns, unknowns);
    A.setFromTriplets(trip.begin(), trip.end());

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(opts.tol);
    if (opts.max_iterations > 0) cg.setMaxIterations(opts.max_iterations);
    cg.compute(A);
    const Eigen::VectorXd sol = cg.solve(rhs);
    if (cg.info() != Eigen::Success && !(cg.error() < 100.0 * opts.tol))
        throw solver_failure("fd_solve: conjugate gradient failed, error " +
                             std::to_string(cg.error()));

    GridSolution out;
    out.grid_size = opts.grid_size;
    out.dr = dr;
    out.dtheta = dt;
    out.iterations = static_cast<int>(cg.iterations());
    out.residual = cg.error();
    out.u.assign(static_cast<std::size_t>(unknowns), 0.0);
    for (int k = 0; k < unknowns; ++k) out.u[static_cast<std::size_t>(k)] = sol[k];

    // Neumann data from the radial grid lines
    std::vector<double> g(static_cast<std::size_t>(n_t));
    for (int j = 0; j < n_t; ++j) {
        const double u0 = boundary[static_cast<std::size_t>(j)];
        const double u1 = sol[idx(n_r - 1, j)];
        const double u2 = sol[idx(n_r - 2, j)];
        g[static_cast<std::size_t>(j)] = cond.sigma1() * (3.0 * u0 - 4.0 * u1 + u2) / (2.0 * dr);
    }
    const int cap = std::max(8, std::min(opts.boundary_angles / 2 - 1, n_t / 2 - 1));
    out.neumann = truncated(from_samples(g), cap);
    out.total_flux = out.neumann.coeff(0).real();

    if (opts.want_interface_trace) {
        std::vector<double> tr(static_cast<std::size_t>(n_t));
        for (int j = 0; j < n_t; ++j) {
            const double th = j * dt;
            double rD;
            if (std::holds_alternative<DiskSpec>(inclusion)) {
                const auto& d = std::get<DiskSpec>(inclusion);
                if (std::abs(d.center()) > 1e-12)
                    throw unsupported_geometry(
                        "fd_solve: interface trace only for centered inclusions");
                rD = d.radius();
            } else {
                rD = std::get<PerturbedDiskSpec>(inclusion).polar_radius(th);
            }
            tr[static_cast<std::size_t>(j)] = detail::radial_interp(
                out.u, n_r, n_t, j, dr, sol[pole], boundary, rD);
        }
        out.interface_trace = truncated(from_samples(tr), cap);
    }
    return out;
}

// || g_ref - g_cand ||_{H^s} over the common mode range.
inline double compare(const GridSolution& reference, const DtnResult& candidate,
                      SobolevIndex s = h_minus_half) {
    return sobolev_norm(reference.neumann - candidate.neumann, s);
}

// Flat binary dump of the potential with a JSON sidecar. Layout matches
// GridSolution::u: (n_r - 1) rings of n_theta nodal values followed by the
// pole value.
inline void dump_grid(const GridSolution& gs, const std::string& bin_path,
                      const std::string& json_path) {
    {
        std::FILE* fp = std::fopen(bin_path.c_str(), "wb");
        if (!fp) throw std::runtime_error("dump_grid: cannot open " + bin_path);
        std::fwrite(gs.u.data(), sizeof(double), gs.u.size(), fp);
        std::fclose(fp);
    }
    {
        std::FILE* fp = std::fopen(json_path.c_str(), "w");
        if (!fp) throw std::runtime_error("dump_grid: cannot open " + json_path);
        std::fprintf(fp,
                     "{\"grid\": \"polar\", \"n_r\": %d, \"n_theta\": %d, \"dr\": %.17g, "
                     "\"dtheta\": %.17g, \"r_max\": 1.0, \"layout\": "
                     "\"rings i=1..n_r-1 of n_theta values, then the pole\", "
                     "\"dtype\": \"float64\"}\n",
                     gs.grid_size, gs.grid_size, gs.dr, gs.dtheta);
        std::fclose(fp);
    }
}

} // namespace disktomo
