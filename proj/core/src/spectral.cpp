#include "wigner/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wigner/semicircle.hpp"

namespace wigner {

namespace {

constexpr int kMaxQLIterations = 60;

// Householder reduction of a dense symmetric matrix to tridiagonal form
// (diagonal d, subdiagonal e with e[0] unused). When `vectors` is set, `a`
// is overwritten with the accumulated orthogonal transformation.
void tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e, bool vectors) {
    auto A = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    if (vectors) A(j, i) = A(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    e[j] = g / h;
                    f += e[j] * A(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = A(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k) {
                        A(j, k) -= f * e[k] + g * A(i, k);
                    }
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }

    if (vectors) {
        d[0] = 0.0;
        e[0] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0 && d[i] != 0.0) {
                const std::size_t l = i;
                for (std::size_t j = 0; j < l; ++j) {
                    double g = 0.0;
                    for (std::size_t k = 0; k < l; ++k) g += A(i, k) * A(k, j);
                    for (std::size_t k = 0; k < l; ++k) A(k, j) -= g * A(k, i);
                }
            }
            d[i] = A(i, i);
            A(i, i) = 1.0;
            for (std::size_t j = 0; j < i; ++j) {
                A(j, i) = 0.0;
                A(i, j) = 0.0;
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) d[i] = A(i, i);
        e[0] = 0.0;
    }
}

// Implicit-shift QL with deflation on a tridiagonal (d, e). On entry
// e[i] couples d[i-1] and d[i]; internally renumbered so e[i] couples
// d[i], d[i+1]. Rotations are applied to the columns of z when present.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::size_t n,
                 std::vector<double>* z, std::uint64_t matrix_hash) {
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) {
                    break;
                }
            }
            if (m != l) {
                if (iter++ == kMaxQLIterations) {
                    throw EigenConvergenceError(matrix_hash, l);
                }
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                std::size_t i = m;
                bool underflow = false;
                while (i-- > l) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (std::size_t k = 0; k < n; ++k) {
                            f = (*z)[k * n + i + 1];
                            (*z)[k * n + i + 1] = s * (*z)[k * n + i] + c * f;
                            (*z)[k * n + i] = c * (*z)[k * n + i] - s * f;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void sort_ascending(std::vector<double>& d, std::vector<double>* z, std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::vector<double> ds(n);
    for (std::size_t q = 0; q < n; ++q) ds[q] = d[order[q]];
    d = std::move(ds);
    if (z) {
        std::vector<double> zs(n * n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t q = 0; q < n; ++q) {
                zs[r * n + q] = (*z)[r * n + order[q]];
            }
        }
        *z = std::move(zs);
    }
}

Spectrum solve(const SymmetricMatrix& W, std::vector<double>* vectors_out) {
    const std::size_t n = W.dim();
    if (n == 0) throw std::invalid_argument("eigenvalues: empty matrix");
    if (!W.exactly_symmetric()) {
        throw std::invalid_argument("eigenvalues: matrix is not symmetric");
    }
    std::vector<double> a(W.data().begin(), W.data().end());
    std::vector<double> d(n, 0.0), e(n, 0.0);
    const bool vectors = vectors_out != nullptr;
    if (n == 1) {
        d[0] = a[0];
        if (vectors) a[0] = 1.0;
    } else {
        tridiagonalize(a, n, d, e, vectors);
        ql_implicit(d, e, n, vectors ? &a : nullptr, W.content_hash());
    }
    sort_ascending(d, vectors ? &a : nullptr, n);
    if (vectors) *vectors_out = std::move(a);
    return Spectrum{n, std::move(d)};
}

}  // namespace

EigenConvergenceError::EigenConvergenceError(std::uint64_t matrix_hash,
                                             std::size_t index)
    : std::runtime_error("eigensolver: QL failed to deflate eigenvalue " +
                         std::to_string(index) + " within 60 iterations "
                         "(matrix hash 0x" + [](std::uint64_t h) {
                             char buf[17];
                             std::snprintf(buf, sizeof buf, "%016llx",
                                           static_cast<unsigned long long>(h));
                             return std::string(buf);
                         }(matrix_hash) + ")"),
      hash_(matrix_hash) {}

Spectrum eigenvalues(const SymmetricMatrix& W) { return solve(W, nullptr); }

EigenDecomposition eigen_decomposition(const SymmetricMatrix& W) {
    EigenDecomposition out;
    out.n = W.dim();
    out.spectrum = solve(W, &out.vectors);
    return out;
}

ESD esd_of(const Spectrum& s) { return esd_with_normalizer(s, s.n); }

ESD esd_with_normalizer(const Spectrum& s, std::size_t normalizer) {
    if (normalizer == 0) {
        throw std::invalid_argument("esd_with_normalizer: zero normalizer");
    }
    ESD f;
    f.weight = 1.0 / static_cast<double>(normalizer);
    f.atoms = s.lambdas;
    std::sort(f.atoms.begin(), f.atoms.end());
    return f;
}

double kolmogorov_distance(const ESD& f) {
    const std::size_t m = f.atoms.size();
    double dist = std::abs(f.total_mass() - 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double g = semicircle::cdf(f.atoms[i]);
        const double after = static_cast<double>(i + 1) * f.weight;
        const double before = static_cast<double>(i) * f.weight;
        dist = std::max({dist, std::abs(after - g), std::abs(before - g)});
    }
    return std::min(dist, 1.0);
}

double staircase_distance(const ESD& f, const ESD& h) {
    std::size_t i = 0, k = 0;
    double cf = 0.0, ch = 0.0;
    double dist = 0.0;
    while (i < f.atoms.size() || k < h.atoms.size()) {
        double x;
        if (i < f.atoms.size() && k < h.atoms.size()) {
            x = std::min(f.atoms[i], h.atoms[k]);
        } else if (i < f.atoms.size()) {
            x = f.atoms[i];
        } else {
            x = h.atoms[k];
        }
        while (i < f.atoms.size() && f.atoms[i] == x) {
            cf += f.weight;
            ++i;
        }
        while (k < h.atoms.size() && h.atoms[k] == x) {
            ch += h.weight;
            ++k;
        }
        dist = std::max(dist, std::abs(cf - ch));
    }
    return dist;
}

ESD mean_esd(std::span<const Spectrum> spectra) {
    if (spectra.empty()) throw std::invalid_argument("mean_esd: no spectra");
    const std::size_t n = spectra.front().n;
    ESD pooled;
    pooled.weight = 1.0 / (static_cast<double>(n) *
                           static_cast<double>(spectra.size()));
    pooled.atoms.reserve(n * spectra.size());
    for (const Spectrum& s : spectra) {
        if (s.n != n) {
            throw std::invalid_argument("mean_esd: mismatched dimensions");
        }
        pooled.atoms.insert(pooled.atoms.end(), s.lambdas.begin(),
                            s.lambdas.end());
    }
    std::sort(pooled.atoms.begin(), pooled.atoms.end());
    return pooled;
}

std::vector<RigidityRow> rigidity_profile(const Spectrum& s) {
    if (s.n < 2) throw std::invalid_argument("rigidity_profile: need n >= 2");
    const double n = static_cast<double>(s.n);
    std::vector<RigidityRow> rows;
    rows.reserve(s.n);
    for (std::size_t j = 1; j <= s.n; ++j) {
        const double gamma = semicircle::quantile(static_cast<double>(j) / n);
        const double edge =
            std::min<double>(static_cast<double>(j), n - static_cast<double>(j) + 1.0);
        const double denom = std::pow(edge, -1.0 / 3.0) * std::pow(n, -2.0 / 3.0);
        rows.push_back({j, gamma, std::abs(s.lambdas[j - 1] - gamma) / denom});
    }
    return rows;
}

}  // namespace wigner
