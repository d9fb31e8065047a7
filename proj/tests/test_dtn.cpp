#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "disktomo/dtn.hpp"

using namespace disktomo;

namespace {

FourierSeries random_real_series(int degree, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FourierSeries f(degree);
    for (int n = 1; n <= degree; ++n) {
        cdouble c(u(rng), u(rng));
        f.set_coeff(n, c);
        f.set_coeff(-n, std::conj(c));
    }
    return f;
}

} // namespace

TEST_CASE("conductivities and contrast") {
    Conductivities c(1.0, 2.0);
    CHECK(c.mu() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(Conductivities(2.0, 2.0).mu() == doctest::Approx(0.0));
    CHECK_THROWS_AS(Conductivities(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Conductivities(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("concentric dtn closed form") {
    // mu = 0: pure Laplace multiplier |n| sigma1
    auto f = random_real_series(6, 1);
    auto lap = concentric_dtn(f, 0.5, Conductivities(1.5, 1.5));
    for (int n = 1; n <= 6; ++n)
        CHECK(std::abs(lap.neumann.coeff(n) - 1.5 * static_cast<double>(n) * f.coeff(n)) < 1e-14);

    // rho -> 0 limit equals the mu = 0 case
    auto tiny = concentric_dtn(f, 1e-9, Conductivities(1.0, 2.0));
    for (int n = 1; n <= 6; ++n)
        CHECK(std::abs(tiny.neumann.coeff(n) - static_cast<double>(n) * f.coeff(n)) < 1e-12);

    // f = cos, rho = 0.5, sigma = (1,2): g = (13/11) cos
    auto g = concentric_dtn(cosine_series(), 0.5, Conductivities(1.0, 2.0));
    CHECK(std::abs(g.neumann.coeff(1) - cdouble(13.0 / 22.0, 0.0)) < 1e-14);
    CHECK(std::abs(g.neumann.coeff(0)) == 0.0);
    CHECK(g.neumann.is_real(1e-14));

    // n = 1 multiplier strictly increasing in mu
    double prev = -1e9;
    for (double mu : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
        const double s2 = (1.0 + mu) / (1.0 - mu);
        const double m = concentric_multiplier(1, 0.5, Conductivities(1.0, s2));
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("annulus series solution") {
    // equal constant boundary data: harmonic extension is that constant
    auto c = constant_series(2.5);
    CHECK(annulus_solution(c, c, 0.5, 0.7, 1.1) == doctest::Approx(2.5).epsilon(1e-14));

    // single-mode exterior data, zero interface trace
    const double v = annulus_solution(cosine_series(), FourierSeries(0), 0.5, 0.75, 0.0);
    CHECK(v == doctest::Approx((0.75 - 1.0 / 3.0) / 0.75).epsilon(1e-12)); // 0.5555...

    // r -> 1^- recovers the outer data
    auto Fe = random_real_series(5, 7);
    for (double theta : {0.0, 0.9, 2.2, 4.0}) {
        CHECK(annulus_solution(Fe, FourierSeries(0), 0.5, 1.0 - 1e-9, theta) ==
              doctest::Approx(evaluate(Fe, theta).real()).epsilon(1e-6));
    }
    // r -> rho^+ recovers the trace
    auto h = random_real_series(4, 8);
    for (double theta : {0.3, 1.9, 5.1}) {
        CHECK(annulus_solution(FourierSeries(0), h, 0.5, 0.5 + 1e-9, theta) ==
              doctest::Approx(evaluate(h, theta).real()).epsilon(1e-6));
    }

    CHECK_THROWS_AS(annulus_solution(c, c, 0.5, 0.4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(annulus_solution(c, c, 0.5, 1.1, 0.0), std::invalid_argument);
}

TEST_CASE("interface rhs") {
    Conductivities cond(1.0, 2.0);
    // constants contribute nothing
    auto z = interface_rhs(constant_series(3.0), 0.5, CircleMap::identity(), cond);
    CHECK(z.max_abs_coeff() < 1e-14);

    // xi = Id diagonal multiplier: 2 (s1/s2) |n| rho^{|n|}/(1-rho^{2|n|})
    auto b = interface_rhs(cosine_series(), 0.5, CircleMap::identity(), cond);
    CHECK(std::abs(b.coeff(1) - cdouble(1.0 / 3.0, 0.0)) < 1e-13); // (2/3) cos
    CHECK(b.is_real(1e-13));

    // small map perturbation moves the rhs by O(perturbation)
    auto xi = CircleMap::from_displacement(sine_series(1, 0.01));
    auto bp = interface_rhs(cosine_series(), 0.5, xi, cond, 16);
    const double gap = sobolev_norm(bp - truncated(b, 16), h_minus_half);
    CHECK(gap > 1e-5);
    CHECK(gap < 0.05);
}

TEST_CASE("interface operator") {
    Conductivities cond(1.0, 2.0);
    auto zc = interface_operator(constant_series(4.0), 0.5, CircleMap::identity(), cond,
                                 InterfaceVariant::T);
    CHECK(zc.max_abs_coeff() < 1e-14);
    auto zx = interface_operator(constant_series(4.0), 0.5, CircleMap::identity(), cond,
                                 InterfaceVariant::T_xi);
    CHECK(zx.max_abs_coeff() < 1e-14);

    // T on cos with rho=0.5, sigma=(1,2): gain 1 + (1/2)(5/3) = 11/6
    auto t = interface_operator(cosine_series(), 0.5, CircleMap::identity(), cond,
                                InterfaceVariant::T);
    CHECK(std::abs(t.coeff(1) - cdouble(11.0 / 12.0, 0.0)) < 1e-13);

    // T_xi with xi = Id equals T on a random series
    auto h = random_real_series(16, 3);
    auto a = interface_operator(h, 0.4, CircleMap::identity(), cond, InterfaceVariant::T, 16);
    auto b = interface_operator(h, 0.4, CircleMap::identity(), cond, InterfaceVariant::T_xi, 16);
    CHECK(sobolev_norm(a - b, h_minus_half) < 1e-12);
}

TEST_CASE("solve_interface: diagonal closed form") {
    Conductivities cond(1.0, 2.0);
    auto Fe = truncated(cosine_series(), 8);
    auto trace = solve_interface(Fe, 0.5, CircleMap::identity(), cond);
    // c1(h) = (1-mu) rho c1(Fe)/(1-mu rho^2) = 2/11
    CHECK(std::abs(trace.h.coeff(1) - cdouble(2.0 / 11.0, 0.0)) < 1e-13);
    CHECK(std::abs(evaluate(trace.h, 0.0).real() - 4.0 / 11.0) < 1e-12);
    CHECK(trace.residual < 1e-11);

    // constant data: side condition forces h = same constant
    auto tc = solve_interface(truncated(constant_series(1.7), 4), 0.5, CircleMap::identity(), cond);
    CHECK(std::abs(tc.h.coeff(0) - cdouble(1.7, 0.0)) < 1e-14);
    for (int n = 1; n <= 4; ++n) CHECK(std::abs(tc.h.coeff(n)) < 1e-14);
}

TEST_CASE("solve_interface: perturbation scaling in the map") {
    Conductivities cond(1.0, 2.0);
    auto Fe = truncated(cosine_series(), 24);
    auto h0 = solve_interface(Fe, 0.5, CircleMap::identity(), cond).h;
    std::vector<double> eps{0.01, 0.02, 0.04};
    std::vector<double> gaps;
    for (double e : eps) {
        auto xi = CircleMap::from_displacement(sine_series(2, 0.5 * e));
        gaps.push_back(sobolev_norm(solve_interface(Fe, 0.5, xi, cond).h - h0, h_half));
    }
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
        CHECK(std::log2(gaps[i + 1] / gaps[i]) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("transplanted dtn collapses to the concentric multiplier") {
    // algebraic identity (1+r)(1-mu r) - 2(1-mu) r = (1-r)(1+mu r) with r = rho^{2n},
    // exercised through the closed-form diagonal trace
    for (double rho : {0.3, 0.5, 0.8}) {
        for (double s2 : {0.25, 0.5, 2.0, 7.0}) {
            Conductivities cond(1.0, s2);
            auto Fe = random_real_series(12, 17);
            auto trace = solve_interface(Fe, rho, CircleMap::identity(), cond);
            auto g = transplanted_dtn(Fe, trace.h, rho, cond);
            auto ref = concentric_dtn(Fe, rho, cond);
            for (int n = -12; n <= 12; ++n)
                CHECK(std::abs(g.neumann.coeff(n) - ref.neumann.coeff(n)) <
                      1e-12 * std::max(1.0, std::abs(ref.neumann.coeff(n))));
        }
    }

    // plug-in values
    auto g = transplanted_dtn(cosine_series(), FourierSeries(0), 0.5, Conductivities(1.0, 2.0));
    CHECK(std::abs(g.neumann.coeff(1) - cdouble(5.0 / 6.0, 0.0)) < 1e-13); // (5/3) cos

    auto zz = transplanted_dtn(constant_series(1.0), constant_series(1.0), 0.5,
                               Conductivities(1.0, 2.0));
    CHECK(zz.neumann.max_abs_coeff() < 1e-14);
}

TEST_CASE("pipeline identity at eps = 0") {
    Conductivities cond(1.0, 2.0);
    auto spec = PerturbedDiskSpec(DiskSpec(cdouble(0, 0), 0.5), FourierSeries(0), 0.0);
    PipelineOptions opts;
    opts.degree = 32;
    auto g = dtn_perturbed_disk(spec, cosine_series(), cond, opts);
    CHECK(std::abs(g.neumann.coeff(1) - cdouble(13.0 / 22.0, 0.0)) < 1e-10);
    CHECK(std::abs(g.neumann.coeff(0)) < 1e-10);
    CHECK(g.neumann.is_real(1e-11));
}

TEST_CASE("pipeline: equal conductivities make the inclusion invisible") {
    Conductivities cond(1.3, 1.3);
    auto spec = PerturbedDiskSpec(DiskSpec(cdouble(0, 0), 0.4), cosine_series(3), 0.02);
    PipelineOptions opts;
    opts.degree = 48;
    auto g = dtn_perturbed_disk(spec, cosine_series(), cond, opts);
    // Laplace DtN of cos is 1.3 cos regardless of the inclusion
    CHECK(std::abs(g.neumann.coeff(1) - cdouble(1.3 / 2.0, 0.0)) < 1e-9);
    double rest = 0.0;
    for (int n = 2; n <= 48; ++n) rest = std::max(rest, std::abs(g.neumann.coeff(n)));
    CHECK(rest < 1e-9);
}

TEST_CASE("pipeline output is real with zero total flux") {
    Conductivities cond(1.0, 2.0);
    PipelineOptions opts;
    opts.degree = 64;
    auto spec = PerturbedDiskSpec(DiskSpec(cdouble(0, 0), 0.4), cosine_series(3), 0.02);
    auto g = dtn_perturbed_disk(spec, cosine_series(), cond, opts);
    CHECK(std::abs(g.neumann.coeff(0)) < 1e-10);
    CHECK(g.neumann.reality_defect() < 1e-11);
}

TEST_CASE("dtn error norm and eps scaling") {
    Conductivities cond(1.0, 2.0);
    PipelineOptions opts;
    opts.degree = 64;

    auto zero = PerturbedDiskSpec(DiskSpec(cdouble(0, 0), 0.4), cosine_series(3), 0.0);
    CHECK(dtn_error_norm(zero, cosine_series(), cond, opts) < 1e-9);

    std::vector<double> eps{0.004, 0.008, 0.016, 0.032};
    auto rows = dtn_error_sweep(0.4, cosine_series(3), eps, cosine_series(), cond, opts);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double ratio = rows[i + 1].error_hminushalf / rows[i].error_hminushalf;
        CHECK(ratio > 1.7);
        CHECK(ratio < 2.3);
    }
    // zero-flux and reality across the sweep, and the contraction diagnostic
    // stays proportional to ||xi - I||
    for (const auto& r : rows) {
        CHECK(r.rho > 0.2);
        CHECK(r.xi_w1inf < 1.0);
    }
}

TEST_CASE("contraction estimate scales with the map distance") {
    Conductivities cond(1.0, 2.0);
    std::vector<double> dist, est;
    for (double a : {0.01, 0.02, 0.04}) {
        auto xi = CircleMap::from_displacement(sine_series(2, a));
        dist.push_back(w1inf_distance(xi));
        est.push_back(interface_contraction_estimate(0.5, xi, cond, 24));
    }
    for (std::size_t i = 0; i < est.size(); ++i) {
        CHECK(est[i] < 1.0);
        const double ratio = est[i] / dist[i];
        CHECK(ratio > 0.05);
        CHECK(ratio < 20.0);
    }
    // roughly linear: bounded ratio across the sweep
    CHECK(est[2] / est[0] == doctest::Approx(4.0).epsilon(0.3));
}
