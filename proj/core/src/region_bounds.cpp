#include "wigner/region_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wigner {

namespace {

using Cdl = std::complex<double>;

constexpr double kTruncationFloor = 1e-12;  // |S_F - S_G| cut for tails
constexpr double kGolden = 0.6180339887498949;

template <class T>
struct SimpsonState {
    const std::function<T(double)>* f;
    int max_depth;
};

template <class T>
T simpson_recurse(const SimpsonState<T>& st, double a, double b, T fa, T fm,
                  T fb, T whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = (*st.f)(lm);
    const T frm = (*st.f)(rm);
    const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const T delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth >= st.max_depth) throw QuadratureError(a, b);
    return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

template <class T>
T simpson(const std::function<T(double)>& f, double a, double b,
          const QuadratureOptions& opts) {
    if (a == b) return T{};
    SimpsonState<T> st{&f, opts.max_depth};
    const T fa = f(a);
    const T fb = f(b);
    const T fm = f(0.5 * (a + b));
    const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(st, a, b, fa, fm, fb, whole, opts.abs_tol, 0);
}

}  // namespace

QuadratureError::QuadratureError(double a, double b)
    : std::runtime_error("quadrature failed to converge on segment [" +
                         std::to_string(a) + ", " + std::to_string(b) + "]"),
      segment_lo(a),
      segment_hi(b) {}

namespace quadrature {

Cdl integrate(const std::function<Cdl(double)>& f, double a, double b,
              const QuadratureOptions& opts) {
    return simpson<Cdl>(f, a, b, opts);
}

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      const QuadratureOptions& opts) {
    return simpson<double>(f, a, b, opts);
}

}  // namespace quadrature

RegionSpec make_region(std::size_t n, double a0, std::size_t u_count,
                       std::size_t v_count) {
    const SmoothingParams p = semicircle::smoothing_params(n, a0);
    RegionSpec spec;
    spec.n = n;
    spec.a0 = a0;
    spec.epsilon = p.epsilon;
    spec.u_count = u_count;
    spec.v_count = v_count;
    return spec;
}

double gamma_of(double u) { return std::abs(2.0 - std::abs(u)); }

static void validate_region(const RegionSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("RegionSpec: n must be >= 1");
    if (!(spec.epsilon > 0.0 && spec.epsilon < 0.5)) {
        throw std::invalid_argument("RegionSpec: epsilon must lie in (0, 1/2)");
    }
    if (spec.u_count < 2 || spec.v_count < 2) {
        throw std::invalid_argument("RegionSpec: need at least a 2x2 grid");
    }
}

bool region_contains(const RegionSpec& spec, const UpperHalfPoint& z) {
    if (!in_upper_half_plane(z)) return false;
    if (z.u < -2.0 + spec.epsilon || z.u > 2.0 - spec.epsilon) return false;
    const double v0 = spec.a0 / static_cast<double>(spec.n);
    return z.v >= v0 / std::sqrt(gamma_of(z.u));
}

std::pair<double, double> window_inequality_excess(std::size_t n, double a0,
                                                   const UpperHalfPoint& z) {
    const Cdl zc = to_complex(z);
    const double z2m4 = std::abs(zc * zc - 4.0);
    const double gamma = gamma_of(z.u);
    const double first = 2.0 * std::max(gamma, z.v) - z2m4;
    const double second = std::numbers::sqrt2 * a0 -
                          static_cast<double>(n) * z.v * std::sqrt(z2m4);
    return {first, second};
}

std::vector<UpperHalfPoint> region_grid(const RegionSpec& spec) {
    validate_region(spec);
    const double v0 = spec.a0 / static_cast<double>(spec.n);
    const double u_lo = -2.0 + spec.epsilon;
    const double u_hi = 2.0 - spec.epsilon;
    std::vector<UpperHalfPoint> grid;
    grid.reserve(spec.u_count * spec.v_count);
    for (std::size_t i = 0; i < spec.u_count; ++i) {
        const double frac = static_cast<double>(i) /
                            static_cast<double>(spec.u_count - 1);
        const double u = u_lo + frac * (u_hi - u_lo);
        const double v_lo = v0 / std::sqrt(gamma_of(u));
        const double v_hi = 4.0;
        const double ratio = v_hi / v_lo;
        for (std::size_t k = 0; k < spec.v_count; ++k) {
            const double t = static_cast<double>(k) /
                             static_cast<double>(spec.v_count - 1);
            const UpperHalfPoint z{u, v_lo * std::pow(ratio, t)};
            if (!region_contains(spec, z)) {
                throw std::logic_error("region_grid: produced non-member point");
            }
            const auto [e1, e2] = window_inequality_excess(spec.n, spec.a0, z);
            if (e1 > 1e-12 || e2 > 1e-12 * spec.a0) {
                throw std::logic_error(
                    "region_grid: window inequality failed at a grid point");
            }
            grid.push_back(z);
        }
    }
    return grid;
}

double envelope_value(std::size_t n, const UpperHalfPoint& z) {
    require_upper_half(z, "envelope_value");
    const double nd = static_cast<double>(n);
    const Cdl zc = to_complex(z);
    const double z2m4 = std::abs(zc * zc - 4.0);
    return 1.0 / (nd * std::pow(z.v, 0.75)) +
           1.0 / (std::pow(nd, 1.5) * std::pow(z.v, 1.5) * std::pow(z2m4, 0.25));
}

double envelope_ratio(const std::complex<double>& mean_lambda, std::size_t n,
                      const UpperHalfPoint& z) {
    return std::abs(mean_lambda) / envelope_value(n, z);
}

namespace {

// int_{-inf}^{inf} |S_F - S_G| at height V: a central segment plus dyadic
// tail blocks, truncated once the integrand falls below the floor.
double horizontal_integral(const TransformSampler& s_f, double v_top,
                           const QuadratureOptions& opts) {
    auto diff = [&](double u) {
        const UpperHalfPoint z{u, v_top};
        return std::abs(s_f(z) - semicircle::stieltjes(z));
    };
    double total = quadrature::integrate_real(diff, -8.0, 8.0, opts);
    for (const double sign : {1.0, -1.0}) {
        double lo = 8.0;
        while (lo < 1e9) {
            const double hi = 2.0 * lo;
            if (std::max({diff(sign * lo), diff(sign * 0.5 * (lo + hi)),
                          diff(sign * hi)}) < kTruncationFloor) {
                break;
            }
            total += quadrature::integrate_real(
                diff, sign > 0 ? lo : -hi, sign > 0 ? hi : -lo, opts);
            lo = hi;
        }
    }
    return total;
}

}  // namespace

BoundBreakdown smoothing_bound(const TransformSampler& s_f,
                               const SmoothingParams& params, double c1,
                               double c2, double v_top,
                               const QuadratureOptions& opts) {
    if (!(v_top > params.v0)) {
        throw std::invalid_argument("smoothing_bound: need V > v0");
    }
    BoundBreakdown bd;
    bd.c1 = c1;
    bd.c2 = c2;
    bd.term_c1v0 = c1 * params.v0;
    bd.term_c2eps = c2 * std::pow(params.epsilon, 1.5);
    bd.integral_top = horizontal_integral(s_f, v_top, opts);

    // sup over x in J'_eps of the vertical integral.
    auto vertical = [&](double x) {
        const double v_lo = params.v0 / std::sqrt(gamma_of(x));
        auto diff = [&](double u) {
            const UpperHalfPoint z{x, u};
            return std::abs(s_f(z) - semicircle::stieltjes(z));
        };
        return quadrature::integrate_real(diff, v_lo, v_top, opts);
    };

    const double half_eps = 0.5 * params.epsilon;
    const double x_lo = -2.0 + half_eps;
    const double x_hi = 2.0 - half_eps;
    constexpr std::size_t kCoarse = 257;
    double best_x = x_lo;
    double best = -1.0;
    std::size_t best_i = 0;
    bd.profile.reserve(kCoarse);
    for (std::size_t i = 0; i < kCoarse; ++i) {
        const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) /
                                    static_cast<double>(kCoarse - 1);
        const double val = vertical(x);
        bd.profile.emplace_back(x, val);
        if (val > best) {
            best = val;
            best_x = x;
            best_i = i;
        }
    }
    // Golden-section refinement in the bracket around the coarse argmax.
    {
        const double step = (x_hi - x_lo) / static_cast<double>(kCoarse - 1);
        double a = std::max(x_lo, best_x - step);
        double b = std::min(x_hi, best_x + step);
        (void)best_i;
        double x1 = b - kGolden * (b - a);
        double x2 = a + kGolden * (b - a);
        double f1 = vertical(x1);
        double f2 = vertical(x2);
        for (int it = 0; it < 40 && (b - a) > 1e-10; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kGolden * (b - a);
                f2 = vertical(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kGolden * (b - a);
                f1 = vertical(x1);
            }
            const double mid = std::max(f1, f2);
            if (mid > best) {
                best = mid;
                best_x = (f1 > f2) ? x1 : x2;
            }
        }
    }
    bd.integral_vertical = best;
    bd.sup_x = best_x;
    bd.total = 2.0 * bd.integral_top + bd.term_c1v0 + bd.term_c2eps +
               2.0 * bd.integral_vertical;
    return bd;
}

ContourResult contour_check(const TransformSampler& s_f,
                            const TransformSampler& s_g, double x,
                            double v_prime, double v_top, double big_l,
                            const QuadratureOptions& opts) {
    if (!(v_prime > 0.0 && v_top > v_prime && big_l > 0.0)) {
        throw std::invalid_argument("contour_check: need 0 < v' < V and L > 0");
    }
    auto diff = [&](const UpperHalfPoint& z) { return s_f(z) - s_g(z); };

    auto bottom = [&](double u) { return diff({u, v_prime}); };
    auto top = [&](double u) { return diff({u, v_top}); };
    auto left = [&](double v) { return diff({-big_l, v}); };
    auto right = [&](double v) { return diff({x, v}); };

    const Cdl i_bottom = quadrature::integrate(bottom, -big_l, x, opts);
    const Cdl i_top = quadrature::integrate(top, -big_l, x, opts);
    const Cdl i_left = quadrature::integrate(left, v_prime, v_top, opts);
    const Cdl i_right = quadrature::integrate(right, v_prime, v_top, opts);

    const Cdl iu{0.0, 1.0};  // dz = i du on the vertical edges
    const Cdl defect = i_bottom - i_top - iu * i_left + iu * i_right;
    return {std::abs(defect), std::abs(i_left)};
}

std::pair<double, double> calibrate_constants(
    const std::vector<CalibrationRun>& runs) {
    if (runs.empty()) {
        throw std::invalid_argument("calibrate_constants: no runs");
    }
    double kappa = 0.0;
    for (const CalibrationRun& run : runs) {
        const BoundBreakdown& bd = run.breakdown;
        const double base = bd.term_c1v0 / bd.c1 + bd.term_c2eps / bd.c2;
        const double need =
            (run.delta_direct - 2.0 * bd.integral_top - 2.0 * bd.integral_vertical) /
            base;
        kappa = std::max(kappa, need);
    }
    return {kappa, kappa};
}

}  // namespace wigner
