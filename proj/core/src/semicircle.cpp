#include "wigner/semicircle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wigner {

bool in_upper_half_plane(const UpperHalfPoint& z) {
    return std::isfinite(z.u) && std::isfinite(z.v) && z.v > 0.0;
}

void require_upper_half(const UpperHalfPoint& z, const char* where) {
    if (!in_upper_half_plane(z)) {
        throw std::invalid_argument(std::string(where) +
                                    ": point must satisfy v > 0 and be finite");
    }
}

std::complex<double> to_complex(const UpperHalfPoint& z) { return {z.u, z.v}; }

namespace semicircle {

namespace {
constexpr double kPi = std::numbers::pi;

void require_finite(double x, const char* where) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument(std::string(where) + ": non-finite input");
    }
}
}  // namespace

double density(double x) {
    require_finite(x, "semicircle::density");
    if (x <= -2.0 || x >= 2.0) return 0.0;
    return std::sqrt(4.0 - x * x) / (2.0 * kPi);
}

double cdf(double x) {
    require_finite(x, "semicircle::cdf");
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    const double g = 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * kPi) +
                     std::asin(0.5 * x) / kPi;
    // asin rounding can push the value a hair outside [0,1] near the edges.
    return std::clamp(g, 0.0, 1.0);
}

double quantile(double p) {
    require_finite(p, "semicircle::quantile");
    if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("semicircle::quantile: p outside [0,1]");
    }
    if (p == 0.0) return -2.0;
    if (p == 1.0) return 2.0;
    if (p == 0.5) return 0.0;

    double lo = -2.0, hi = 2.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    // One Newton polish; the density is bounded away from zero except at the
    // endpoints, where bisection has already converged.
    const double g = density(x);
    if (g > 1e-8) {
        const double step = (cdf(x) - p) / g;
        const double polished = x - step;
        if (polished > -2.0 && polished < 2.0) x = polished;
    }
    return x;
}

std::complex<double> sqrt_upper(std::complex<double> w) {
    std::complex<double> r = std::sqrt(w);
    if (r.imag() < 0.0) r = -r;
    return r;
}

namespace {

// (-z + root)/2 cancels for large |u| because Re root tracks u in sign. The
// rationalized form -2/(z + root), from (-z + root)(z + root) = -4, never
// cancels: with the Im >= 0 branch both parts of z + root share signs and
// |z + root| = 2/|s| >= 2.
std::complex<double> transform_from_root(std::complex<double> zc,
                                         std::complex<double> root) {
    return -2.0 / (zc + root);
}

}  // namespace

std::complex<double> stieltjes(const UpperHalfPoint& z) {
    require_upper_half(z, "semicircle::stieltjes");
    const std::complex<double> zc = to_complex(z);
    return transform_from_root(zc, sqrt_upper(zc * zc - 4.0));
}

StieltjesValue stieltjes_with_derivative(const UpperHalfPoint& z) {
    require_upper_half(z, "semicircle::stieltjes_with_derivative");
    const std::complex<double> zc = to_complex(z);
    const std::complex<double> root = sqrt_upper(zc * zc - 4.0);
    const std::complex<double> s = transform_from_root(zc, root);
    return {s, -s / root};
}

double smoothing_constant_a() { return 1.0 + std::numbers::sqrt2; }

SmoothingParams smoothing_params(std::size_t n, double A0) {
    if (n < 1) throw std::invalid_argument("smoothing_params: n must be >= 1");
    if (!(A0 > 0.0) || !std::isfinite(A0)) {
        throw std::invalid_argument("smoothing_params: A0 must be positive");
    }
    SmoothingParams p{};
    p.a = smoothing_constant_a();
    p.A0 = A0;
    p.v0 = A0 / static_cast<double>(n);
    p.epsilon = std::pow(2.0 * p.a * p.v0, 2.0 / 3.0);
    if (!(p.epsilon > 0.0 && p.epsilon < 0.5)) {
        throw std::invalid_argument(
            "smoothing_params: trim epsilon = " + std::to_string(p.epsilon) +
            " leaves (0, 1/2); increase n or decrease A0");
    }
    return p;
}

}  // namespace semicircle
}  // namespace wigner
