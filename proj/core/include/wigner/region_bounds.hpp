#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "wigner/semicircle.hpp"

namespace wigner {

/// Spectral-window grid: u in [-2+eps, 2-eps], v from v0/sqrt(gamma(u)) up
/// to 4, log-spaced.
struct RegionSpec {
    std::size_t n = 0;
    double a0 = 1.0;
    double epsilon = 0.0;
    std::size_t u_count = 9;
    std::size_t v_count = 7;
};

RegionSpec make_region(std::size_t n, double a0, std::size_t u_count = 9,
                       std::size_t v_count = 7);

double gamma_of(double u);

bool region_contains(const RegionSpec& spec, const UpperHalfPoint& z);

/// Excess of the two window inequalities at z: positive means violated.
/// first:  2 max(gamma, v) - |z^2 - 4|
/// second: sqrt(2) A0 - n v sqrt(|z^2 - 4|)
std::pair<double, double> window_inequality_excess(std::size_t n, double a0,
                                                   const UpperHalfPoint& z);

/// Emits the grid; every point is checked against membership and the window
/// inequalities before being returned.
std::vector<UpperHalfPoint> region_grid(const RegionSpec& spec);

/// 1/(n v^(3/4)) + 1/(n^(3/2) v^(3/2) |z^2-4|^(1/4)).
double envelope_value(std::size_t n, const UpperHalfPoint& z);

struct StieltjesSample;  // wigner/resolvent.hpp

/// |mean Lambda_n| over the error envelope; the implied-constant estimate.
double envelope_ratio(const std::complex<double>& mean_lambda, std::size_t n,
                      const UpperHalfPoint& z);

struct QuadratureOptions {
    double abs_tol = 1e-8;
    int max_depth = 48;
};

/// Thrown when adaptive subdivision hits max_depth before converging.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(double a, double b);
    double segment_lo, segment_hi;
};

using TransformSampler = std::function<std::complex<double>(const UpperHalfPoint&)>;

struct BoundBreakdown {
    double integral_top = 0.0;       // int |S_F - S_G| at height V
    double integral_vertical = 0.0;  // sup_x of the vertical integral
    double term_c1v0 = 0.0;          // C1 * v0
    double term_c2eps = 0.0;         // C2 * eps^(3/2)
    double total = 0.0;              // 2*top + c1v0 + c2eps + 2*vertical
    double c1 = 1.0;
    double c2 = 1.0;
    double sup_x = 0.0;              // argmax of the vertical integral
    std::vector<std::pair<double, double>> profile;  // (x, vertical(x)) rows
};

/// Smoothing-inequality upper-bound estimate for Delta(F, G) given the
/// transform of F. The sup over x is a 257-point coarse grid followed by
/// golden-section refinement around the maximum.
BoundBreakdown smoothing_bound(const TransformSampler& s_f,
                               const SmoothingParams& params, double c1,
                               double c2, double v_top,
                               const QuadratureOptions& opts = {});

struct ContourResult {
    double residual;             // defect of the closed-rectangle identity
    double left_edge_magnitude;  // |int over the segment at Re z = -L|
};

/// Rectangle check for the transform difference: the bottom-edge integral
/// against the top edge plus the two vertical edges (dz = i du there). The
/// left-edge magnitude is returned separately; it decays as L grows.
ContourResult contour_check(const TransformSampler& s_f,
                            const TransformSampler& s_g, double x,
                            double v_prime, double v_top, double big_l,
                            const QuadratureOptions& opts = {});

struct CalibrationRun {
    double delta_direct;
    BoundBreakdown breakdown;
};

/// Smallest single constant kappa with
/// 2*top + kappa*(v0 + eps^(3/2)) + 2*vertical >= delta on every run;
/// returned as (C1, C2) = (kappa, kappa).
std::pair<double, double> calibrate_constants(
    const std::vector<CalibrationRun>& runs);

namespace quadrature {

/// Adaptive Simpson on a complex integrand; absolute tolerance.
std::complex<double> integrate(const std::function<std::complex<double>(double)>& f,
                               double a, double b, const QuadratureOptions& opts);

/// Adaptive Simpson on a real integrand.
double integrate_real(const std::function<double(double)>& f, double a, double b,
                      const QuadratureOptions& opts);

}  // namespace quadrature

}  // namespace wigner
