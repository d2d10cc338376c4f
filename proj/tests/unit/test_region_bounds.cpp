#include <doctest.h>

#include <cmath>
#include <complex>

#include "wigner/region_bounds.hpp"
#include "wigner/resolvent.hpp"
#include "wigner/spectral.hpp"

using namespace wigner;

namespace {

TransformSampler shifted_semicircle(double delta) {
    return [delta](const UpperHalfPoint& z) {
        return semicircle::stieltjes({z.u - delta, z.v});
    };
}

const TransformSampler kSemicircle = [](const UpperHalfPoint& z) {
    return semicircle::stieltjes(z);
};

double direct_shift_distance(double delta) {
    double best = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double x = -2.2 + 4.4 * i / 100000.0;
        best = std::max(best,
                        std::abs(semicircle::cdf(x - delta) - semicircle::cdf(x)));
    }
    return best;
}

}  // namespace

TEST_SUITE_BEGIN("region_bounds");

TEST_CASE("region grid geometry") {
    const RegionSpec spec = make_region(1000, 1.0, 9, 7);
    CHECK(spec.epsilon == doctest::Approx(0.028572).epsilon(1e-4));

    const auto grid = region_grid(spec);
    REQUIRE(grid.size() == 9 * 7);

    // Lower edge at u = 0 is v0 / sqrt(2).
    double min_v_at_center = 1e9;
    for (const auto& z : grid) {
        if (std::abs(z.u) < 1e-12) min_v_at_center = std::min(min_v_at_center, z.v);
    }
    CHECK(min_v_at_center == doctest::Approx(7.0710678118654746e-4).epsilon(1e-9));

    // Membership is a fixed point: filtering removes nothing.
    for (const auto& z : grid) {
        CHECK(region_contains(spec, z));
        const auto [e1, e2] = window_inequality_excess(spec.n, spec.a0, z);
        CHECK(e1 <= 1e-12);
        CHECK(e2 <= 1e-12);
    }

    CHECK(region_contains(spec, {0.0, 4.0}));   // z = 4i
    CHECK(region_contains(spec, {0.0, 40.0}));  // no ceiling on v
    CHECK(!region_contains(spec, {1.999, 1.0}));
    CHECK(!region_contains(spec, {0.0, 1e-9}));

    RegionSpec bad = spec;
    bad.epsilon = 0.6;
    CHECK_THROWS_AS(region_grid(bad), std::invalid_argument);
}

TEST_CASE("envelope values") {
    CHECK(envelope_ratio({0.0, 0.0}, 100, {0.0, 1.0}) == 0.0);
    CHECK(envelope_value(100, {0.0, 1.0}) ==
          doctest::Approx(0.010668740304976422).epsilon(1e-9));
    const RegionSpec spec = make_region(256, 1.0);
    for (const auto& z : region_grid(spec)) {
        const double env = envelope_value(spec.n, z);
        CHECK(env > 0.0);
        CHECK(std::isfinite(env));
    }
}

TEST_CASE("adaptive quadrature basics") {
    const QuadratureOptions opts;
    const double one = quadrature::integrate_real(
        [](double x) { return 3.0 * x * x; }, 0.0, 1.0, opts);
    CHECK(one == doctest::Approx(1.0).epsilon(1e-10));

    const auto rot = quadrature::integrate(
        [](double t) { return std::complex<double>{std::cos(t), std::sin(t)}; },
        0.0, std::numbers::pi, opts);
    CHECK(std::abs(rot - std::complex<double>{0.0, 2.0}) <= 1e-8);

    QuadratureOptions strict;
    strict.abs_tol = 1e-15;
    strict.max_depth = 3;
    try {
        quadrature::integrate_real([](double x) { return std::sin(50.0 * x); },
                                   0.0, 3.0, strict);
        FAIL("expected quadrature failure");
    } catch (const QuadratureError& e) {
        CHECK(e.segment_lo >= 0.0);
        CHECK(e.segment_hi <= 3.0);
    }
}

TEST_CASE("smoothing bound: F = G collapses to the constant terms") {
    const SmoothingParams params = semicircle::smoothing_params(1000, 1.0);
    const BoundBreakdown bd = smoothing_bound(kSemicircle, params, 1.0, 1.0, 4.0);
    CHECK(bd.integral_top == 0.0);
    CHECK(bd.integral_vertical == 0.0);
    CHECK(bd.total == doctest::Approx(params.v0 + std::pow(params.epsilon, 1.5))
                          .epsilon(1e-15));
    CHECK(bd.total >= 0.0);
}

TEST_CASE("smoothing bound: breakdown is additive and monotone in C1, C2") {
    const SmoothingParams params = semicircle::smoothing_params(500, 1.0);
    const TransformSampler s_f = shifted_semicircle(0.05);
    const BoundBreakdown bd = smoothing_bound(s_f, params, 1.0, 1.0, 4.0);
    CHECK(bd.total ==
          doctest::Approx(2.0 * bd.integral_top + bd.term_c1v0 + bd.term_c2eps +
                          2.0 * bd.integral_vertical)
              .epsilon(1e-15));
    const BoundBreakdown bigger = smoothing_bound(s_f, params, 2.0, 3.0, 4.0);
    CHECK(bigger.total > bd.total);
    CHECK(bigger.term_c1v0 == doctest::Approx(2.0 * bd.term_c1v0));
    CHECK(bigger.term_c2eps == doctest::Approx(3.0 * bd.term_c2eps));
    CHECK(!bd.profile.empty());
}

TEST_CASE("smoothing bound dominates the directly computed distance") {
    const SmoothingParams params = semicircle::smoothing_params(1000, 1.0);
    const double delta = direct_shift_distance(0.05);
    const BoundBreakdown bd =
        smoothing_bound(shifted_semicircle(0.05), params, 1.0, 1.0, 4.0);
    CHECK(bd.total >= delta);
}

TEST_CASE("halving the quadrature tolerance leaves the total stable") {
    const SmoothingParams params = semicircle::smoothing_params(1000, 1.0);
    QuadratureOptions coarse;  // 1e-8
    QuadratureOptions fine;
    fine.abs_tol = coarse.abs_tol / 16.0;  // one extra halving of the step
    const BoundBreakdown a =
        smoothing_bound(shifted_semicircle(0.05), params, 1.0, 1.0, 4.0, coarse);
    const BoundBreakdown b =
        smoothing_bound(shifted_semicircle(0.05), params, 1.0, 1.0, 4.0, fine);
    CHECK(std::abs(a.total - b.total) < 1e-6 * a.total);
}

TEST_CASE("contour check: identical samplers give zero residual") {
    const ContourResult r =
        contour_check(kSemicircle, kSemicircle, 0.0, 0.01, 4.0, 50.0);
    CHECK(r.residual == 0.0);
    CHECK(r.left_edge_magnitude == 0.0);
}

TEST_CASE("contour check: shifted semicircle") {
    const TransformSampler s_f = shifted_semicircle(0.05);
    const ContourResult at50 =
        contour_check(s_f, kSemicircle, 0.0, 0.01, 4.0, 50.0);
    CHECK(at50.residual <= 1e-6);

    const ContourResult at10 =
        contour_check(s_f, kSemicircle, 0.0, 0.01, 4.0, 10.0);
    const ContourResult at25 =
        contour_check(s_f, kSemicircle, 0.0, 0.01, 4.0, 25.0);
    // The residual never grows with L (up to quadrature tolerance), and the
    // left-edge contribution decays outright.
    CHECK(at25.residual <= at10.residual + 1e-7);
    CHECK(at50.residual <= at25.residual + 1e-7);
    CHECK(at25.left_edge_magnitude < at10.left_edge_magnitude);
    CHECK(at50.left_edge_magnitude < at25.left_edge_magnitude);

    CHECK_THROWS_AS(contour_check(s_f, kSemicircle, 0.0, -0.01, 4.0, 50.0),
                    std::invalid_argument);
}

TEST_CASE("calibration produces a covering bound for a small ensemble run") {
    // Pooled ESD of a few draws; its transform is the mean of the replicas'.
    std::vector<Spectrum> spectra;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        spectra.push_back(eigenvalues(sample_wigner(
            WignerSpec{32, EntryLaw::gaussian(), seed, 2.0, false})));
    }
    const ESD pooled = mean_esd(spectra);
    const double delta = kolmogorov_distance(pooled);

    const TransformSampler s_f = [&](const UpperHalfPoint& z) {
        const std::complex<double> zc = to_complex(z);
        std::complex<double> sum{};
        for (double atom : pooled.atoms) sum += 1.0 / (atom - zc);
        return sum * pooled.weight;
    };
    const SmoothingParams params = semicircle::smoothing_params(32, 0.5);
    const BoundBreakdown base = smoothing_bound(s_f, params, 1.0, 1.0, 4.0);
    MESSAGE("delta=", delta, " default-constant bound=", base.total);

    const auto [c1, c2] = calibrate_constants({{delta, base}});
    const BoundBreakdown covered = smoothing_bound(s_f, params, c1, c2, 4.0);
    CHECK(covered.total + 1e-12 >= delta);

    CHECK_THROWS_AS(calibrate_constants({}), std::invalid_argument);
}

TEST_SUITE_END();
