#pragma once

#include <complex>
#include <cstddef>

namespace wigner {

/// A point z = u + iv in the open upper half-plane.
struct UpperHalfPoint {
    double u = 0.0;
    double v = 1.0;
};

bool in_upper_half_plane(const UpperHalfPoint& z);
void require_upper_half(const UpperHalfPoint& z, const char* where);
std::complex<double> to_complex(const UpperHalfPoint& z);

/// Parameters coupling the spectral-window trim to the grid scale:
/// a solves (2/pi) atan(a) = 3/4, v0 = A0/n, and epsilon^(3/2) = 2 v0 a.
struct SmoothingParams {
    double a;
    double v0;
    double epsilon;
    double A0;
};

namespace semicircle {

/// Density (1/2pi) sqrt(4 - x^2) on [-2, 2], zero outside.
double density(double x);

/// Distribution function G(x) = 1/2 + x sqrt(4-x^2)/(4 pi) + asin(x/2)/pi,
/// clamped to [0, 1] for |x| >= 2.
double cdf(double x);

/// Inverse of cdf on [0, 1]; quantile(j/n) realizes the j-th spectral
/// quantile. |cdf(quantile(p)) - p| <= 1e-12.
double quantile(double p);

/// Square root with nonnegative imaginary part.
std::complex<double> sqrt_upper(std::complex<double> w);

/// Stieltjes transform s(z) = (-z + sqrt(z^2 - 4))/2 with Im sqrt >= 0.
/// Satisfies s^2 + z s + 1 = 0, Im s > 0, |s| <= 1 for v > 0.
std::complex<double> stieltjes(const UpperHalfPoint& z);

struct StieltjesValue {
    std::complex<double> value;
    std::complex<double> derivative;  // -s(z)/sqrt(z^2-4)
};

StieltjesValue stieltjes_with_derivative(const UpperHalfPoint& z);

/// The absolute constant a with (1/pi) int_{|u|<=a} du/(1+u^2) = 3/4,
/// i.e. a = tan(3 pi / 8) = 1 + sqrt(2).
double smoothing_constant_a();

/// Builds SmoothingParams for dimension n and grid constant A0 > 0.
/// Throws if the induced trim epsilon leaves (0, 1/2).
SmoothingParams smoothing_params(std::size_t n, double A0);

}  // namespace semicircle

}  // namespace wigner
