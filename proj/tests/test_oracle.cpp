#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "disktomo/moebius.hpp"
#include "disktomo/oracle.hpp"

using namespace disktomo;

TEST_CASE("fd_solve: harmonic sanity and maximum principle") {
    Conductivities cond(1.2, 1.2); // no contrast: plain Laplace
    OracleOptions o;
    o.grid_size = 128;
    auto gs = fd_solve(DiskSpec(cdouble(0, 0), 0.3), cond, cosine_series(), o);
    // u = r cos theta: nodal error O(h^2) and Neumann data sigma1 * cos
    CHECK(std::abs(gs.neumann.coeff(1) - cdouble(0.6, 0.0)) < 2e-4);
    double node_err = 0.0;
    for (int i = 1; i < o.grid_size; ++i) {
        for (int j = 0; j < o.grid_size; ++j) {
            const double r = i * gs.dr, th = j * gs.dtheta;
            node_err = std::max(node_err, std::abs(gs.u[static_cast<std::size_t>(i - 1) *
                                                            o.grid_size + j] -
                                                   r * std::cos(th)));
        }
    }
    CHECK(node_err < 10.0 * gs.dr * gs.dr);
    double lo = 1e300, hi = -1e300;
    for (double v : gs.u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= -1.0 - 1e-9);
    CHECK(hi <= 1.0 + 1e-9);

    CHECK_THROWS_AS(fd_solve(DiskSpec(cdouble(0, 0), 0.3), cond, cosine_series(),
                             OracleOptions{32}),
                    std::invalid_argument);
}

TEST_CASE("fd_solve: maximum principle with contrast on a perturbed inclusion") {
    Conductivities cond(1.0, 5.0);
    auto spec = PerturbedDiskSpec(DiskSpec(cdouble(0, 0), 0.4), cosine_series(2), 0.03);
    OracleOptions o;
    o.grid_size = 96;
    // nontrivial mixed data
    FourierSeries f(2);
    f.set_coeff(1, cdouble(0.5, 0.0));
    f.set_coeff(-1, cdouble(0.5, 0.0));
    f.set_coeff(2, cdouble(0.0, -0.25));
    f.set_coeff(-2, cdouble(0.0, 0.25));
    auto gs = fd_solve(spec, cond, f, o);
    double fmin = 1e300, fmax = -1e300;
    for (int j = 0; j < 512; ++j) {
        const double v = evaluate(f, two_pi * j / 512.0).real();
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
    }
    for (double v : gs.u) {
        CHECK(v >= fmin - 1e-9);
        CHECK(v <= fmax + 1e-9);
    }
    CHECK(std::abs(gs.total_flux) < 1e-6);
}

TEST_CASE("fd_solve: concentric case against the closed form") {
    Conductivities cond(1.0, 2.0);
    OracleOptions o;
    o.grid_size = 512;
    o.want_interface_trace = true;
    auto gs = fd_solve(DiskSpec(cdouble(0, 0), 0.5), cond, cosine_series(), o);

    auto exact = concentric_dtn(truncated(cosine_series(), 127), 0.5, cond); // (13/11) cos
    const double rel = compare(gs, exact) / sobolev_norm(exact.neumann, h_minus_half);
    CHECK(rel < 0.02);
    CHECK(rel < 1e-4); // the polar scheme does far better than the 2% budget

    FourierSeries trace_exact(1); // (4/11) cos
    trace_exact.set_coeff(1, cdouble(2.0 / 11.0, 0.0));
    trace_exact.set_coeff(-1, cdouble(2.0 / 11.0, 0.0));
    REQUIRE(gs.interface_trace.has_value());
    const double trel = sobolev_norm(*gs.interface_trace - trace_exact, h_half) /
                        sobolev_norm(trace_exact, h_half);
    CHECK(trel < 0.02);

    CHECK(std::abs(gs.total_flux) < 1e-8);
}

TEST_CASE("fd_solve: second-order self convergence") {
    Conductivities cond(1.0, 2.0);
    auto exact = concentric_dtn(truncated(cosine_series(), 63), 0.5, cond);
    const double rn = sobolev_norm(exact.neumann, h_minus_half);
    double e_prev = 0.0;
    for (int n : {128, 256}) {
        OracleOptions o;
        o.grid_size = n;
        auto gs = fd_solve(DiskSpec(cdouble(0, 0), 0.5), cond, cosine_series(), o);
        const double e = compare(gs, exact) / rn;
        if (e_prev > 0.0) {
            const double order = std::log2(e_prev / e);
            CHECK(order > 1.8);
            CHECK(order < 2.2);
        }
        e_prev = e;
    }
}

TEST_CASE("compare: identity and negative control") {
    Conductivities cond(1.0, 2.0);
    OracleOptions o;
    o.grid_size = 96;
    auto gs = fd_solve(DiskSpec(cdouble(0, 0), 0.4), cond, cosine_series(), o);
    CHECK(compare(gs, DtnResult{gs.neumann, {}}) == doctest::Approx(0.0));

    // deliberately mismatched conductivities: O(1) gap
    auto wrong = concentric_dtn(truncated(cosine_series(), 127), 0.4, Conductivities(1.0, 6.0));
    const double gap = compare(gs, wrong) / sobolev_norm(wrong.neumann, h_minus_half);
    CHECK(gap > 0.05);
}

TEST_CASE("fd_solve matches the moebius transplant for an off-center disk") {
    Conductivities cond(1.0, 2.0);
    const cdouble b(0.2, 0.1);
    const double R2 = 0.3;
    MoebiusMap m(b);
    auto spectral = transplant_dtn(m, R2, cond, cosine_series(), 96);

    // physical inclusion: image of |w| = R2 under the inverse Moebius map
    const double b2 = std::norm(b);
    const cdouble center = b * (1.0 - R2 * R2) / (1.0 - b2 * R2 * R2);
    const double radius = R2 * (1.0 - b2) / (1.0 - b2 * R2 * R2);

    OracleOptions o;
    o.grid_size = 256;
    auto gs = fd_solve(DiskSpec(center, radius), cond, cosine_series(), o);
    const double rel = compare(gs, spectral) / sobolev_norm(spectral.neumann, h_minus_half);
    CHECK(rel < 0.02);
    CHECK(rel < 1e-3);
}

TEST_CASE("fd_solve matches the spectral pipeline for a perturbed disk") {
    Conductivities cond(1.0, 2.0);
    auto spec = PerturbedDiskSpec(DiskSpec(cdouble(0, 0), 0.4), cosine_series(3), 0.02);
    PipelineOptions po;
    po.degree = 64;
    auto spectral = dtn_perturbed_disk(spec, cosine_series(), cond, po);
    OracleOptions o;
    o.grid_size = 256;
    auto gs = fd_solve(spec, cond, cosine_series(), o);
    const double rel = compare(gs, spectral) / sobolev_norm(spectral.neumann, h_minus_half);
    CHECK(rel < 0.02);
    CHECK(rel < 1e-3);
}

TEST_CASE("grid dump round trip") {
    Conductivities cond(1.0, 2.0);
    OracleOptions o;
    o.grid_size = 64;
    auto gs = fd_solve(DiskSpec(cdouble(0, 0), 0.4), cond, cosine_series(), o);
    const std::string bin = "/tmp/disktomo_grid_test.bin";
    const std::string meta = "/tmp/disktomo_grid_test.json";
    dump_grid(gs, bin, meta);
    std::FILE* fp = std::fopen(bin.c_str(), "rb");
    REQUIRE(fp != nullptr);
    std::fseek(fp, 0, SEEK_END);
    CHECK(static_cast<std::size_t>(std::ftell(fp)) == gs.u.size() * sizeof(double));
    std::fclose(fp);
    std::remove(bin.c_str());
    std::remove(meta.c_str());
}
