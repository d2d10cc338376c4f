#include "wigner/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wigner {

namespace {

double norm1(Cd x) { return std::abs(x); }

/// Relative residual: |value| against 1 + the magnitudes of the terms.
double rel(double value_abs, double scale) { return value_abs / (1.0 + scale); }

ComplexMatrix invert(ComplexMatrix a) {
    const std::size_t n = a.dim();
    ComplexMatrix inv(n);
    for (std::size_t i = 0; i < n; ++i) inv.at(i, i) = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = norm1(a.at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = norm1(a.at(r, col));
            if (m > best) {
                best = m;
                pivot = r;
            }
        }
        if (best == 0.0) {
            throw std::runtime_error("invert: singular matrix");
        }
        if (pivot != col) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a.at(pivot, k), a.at(col, k));
                std::swap(inv.at(pivot, k), inv.at(col, k));
            }
        }
        const Cd scale = 1.0 / a.at(col, col);
        for (std::size_t k = 0; k < n; ++k) {
            a.at(col, k) *= scale;
            inv.at(col, k) *= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const Cd f = a.at(r, col);
            if (f == Cd{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < n; ++k) {
                a.at(r, k) -= f * a.at(col, k);
                inv.at(r, k) -= f * inv.at(col, k);
            }
        }
    }
    return inv;
}

std::vector<std::size_t> kept_indices(std::size_t n,
                                      std::span<const std::size_t> deleted) {
    std::vector<std::size_t> del(deleted.begin(), deleted.end());
    std::sort(del.begin(), del.end());
    del.erase(std::unique(del.begin(), del.end()), del.end());
    std::vector<std::size_t> keep;
    keep.reserve(n - del.size());
    std::size_t di = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (di < del.size() && del[di] == i) {
            ++di;
        } else {
            keep.push_back(i);
        }
    }
    return keep;
}

/// eps/eta terms for row j of the (possibly minor) ensemble. `keep` lists the
/// surviving indices of the ambient matrix and must contain j; `r_minor` is
/// the resolvent with rows `keep \ {j}`.
struct RowTerms {
    Cd eps1, eps2, eps3, eps4, eta1, eta2, eta3, minor_trace;
};

RowTerms row_terms(const SymmetricMatrix& W, std::size_t j,
                   std::span<const std::size_t> others,
                   const ComplexMatrix& r_minor, Cd outer_trace) {
    const double n = static_cast<double>(W.dim());
    const double sqrt_n = std::sqrt(n);
    const std::size_t m = others.size();

    RowTerms t{};
    t.eps1 = W(j, j);  // X_jj / sqrt(n)

    const ComplexMatrix r2 = multiply(r_minor, r_minor);
    Cd quad{}, diag3{}, quad2{}, diag2{};
    for (std::size_t a = 0; a < m; ++a) {
        const double xa = sqrt_n * W(j, others[a]);
        diag3 += (xa * xa - 1.0) * r_minor.at(a, a);
        diag2 += (xa * xa - 1.0) * r2.at(a, a);
        for (std::size_t b = 0; b < m; ++b) {
            if (a == b) continue;
            const double xb = sqrt_n * W(j, others[b]);
            quad += xa * xb * r_minor.at(a, b);
            quad2 += xa * xb * r2.at(a, b);
        }
    }
    t.eps2 = quad / n;
    t.eps3 = diag3 / n;
    t.minor_trace = r_minor.trace();
    t.eps4 = (t.minor_trace - outer_trace) / n;
    t.eta1 = r2.trace() / n;
    t.eta2 = quad2 / n;
    t.eta3 = diag2 / n;
    return t;
}

}  // namespace

Cd ComplexMatrix::trace() const {
    Cd t{};
    for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.dim();
    if (b.dim() != n) throw std::invalid_argument("multiply: dimension mismatch");
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Cd aik = a.at(i, k);
            if (aik == Cd{0.0, 0.0}) continue;
            for (std::size_t jj = 0; jj < n; ++jj) {
                c.at(i, jj) += aik * b.at(k, jj);
            }
        }
    }
    return c;
}

ComplexMatrix resolvent(const SymmetricMatrix& W, const UpperHalfPoint& z) {
    require_upper_half(z, "resolvent");
    const std::size_t n = W.dim();
    ComplexMatrix a(n);
    const Cd zc = to_complex(z);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) a.at(j, k) = W(j, k);
        a.at(j, j) -= zc;
    }
    return invert(std::move(a));
}

std::vector<Cd> resolvent_diag(const SymmetricMatrix& W, const UpperHalfPoint& z) {
    const ComplexMatrix r = resolvent(W, z);
    std::vector<Cd> diag(W.dim());
    for (std::size_t j = 0; j < W.dim(); ++j) diag[j] = r.at(j, j);
    return diag;
}

StieltjesSample stieltjes_of_spectrum(const Spectrum& s, const UpperHalfPoint& z) {
    require_upper_half(z, "stieltjes_of_spectrum");
    const Cd zc = to_complex(z);
    Cd m{}, mp{};
    for (double lambda : s.lambdas) {
        const Cd inv = 1.0 / (lambda - zc);
        m += inv;
        mp += inv * inv;
    }
    const double n = static_cast<double>(s.n);
    StieltjesSample out;
    out.z = z;
    out.m_n = m / n;
    out.m_n_prime = mp / n;
    out.s = semicircle::stieltjes(z);
    out.lambda_n = out.m_n - out.s;
    return out;
}

EpsilonDecomposition epsilon_decomposition(const SymmetricMatrix& W,
                                           const UpperHalfPoint& z,
                                           std::size_t j) {
    require_upper_half(z, "epsilon_decomposition");
    if (j >= W.dim()) {
        throw std::invalid_argument("epsilon_decomposition: row out of range");
    }
    const ComplexMatrix r = resolvent(W, z);
    const std::size_t del[] = {j};
    const ComplexMatrix r_minor = resolvent(principal_minor(W, del), z);
    std::vector<std::size_t> others = kept_indices(W.dim(), del);

    const RowTerms t = row_terms(W, j, others, r_minor, r.trace());
    EpsilonDecomposition d{};
    d.j = j;
    d.eps1 = t.eps1;
    d.eps2 = t.eps2;
    d.eps3 = t.eps3;
    d.eps4 = t.eps4;
    d.eta1 = t.eta1;
    d.eta2 = t.eta2;
    d.eta3 = t.eta3;
    d.r_jj = r.at(j, j);
    d.minor_trace = t.minor_trace;
    d.sign_convention = EpsilonSign::derivation_corrected;
    return d;
}

void IdentityReport::record(const std::string& name, double residual,
                            const IdentityLocation& loc) {
    IdentityEntry& e = entries[name];
    if (residual >= e.max_residual) {
        e.max_residual = residual;
        e.worst = loc;
    }
}

void IdentityReport::record_inequality(const std::string& name, double excess,
                                       const IdentityLocation& loc) {
    IdentityEntry& e = entries[name];
    e.is_inequality = true;
    if (excess >= e.max_residual) {
        e.max_residual = excess;
        e.worst = loc;
    }
    if (excess > kInequalitySlack) ++e.violations;
}

void IdentityReport::merge(const IdentityReport& other) {
    for (const auto& [name, entry] : other.entries) {
        IdentityEntry& mine = entries[name];
        mine.is_inequality = mine.is_inequality || entry.is_inequality;
        mine.violations += entry.violations;
        if (entry.max_residual >= mine.max_residual) {
            mine.max_residual = entry.max_residual;
            mine.worst = entry.worst;
        }
    }
}

std::size_t IdentityReport::hard_failures() const {
    std::size_t total = 0;
    for (const auto& [name, entry] : entries) total += entry.violations;
    return total;
}

double IdentityReport::max_residual() const {
    double m = 0.0;
    for (const auto& [name, entry] : entries) {
        if (!entry.is_inequality) m = std::max(m, entry.max_residual);
    }
    return m;
}

IdentityReport identity_report(const SymmetricMatrix& W,
                               std::span<const UpperHalfPoint> grid,
                               std::uint64_t seed_tag) {
    const std::size_t n = W.dim();
    const double nd = static_cast<double>(n);
    IdentityReport rep;

    Spectrum spectrum = eigenvalues(W);

    for (const UpperHalfPoint& z : grid) {
        require_upper_half(z, "identity_report");
        const Cd zc = to_complex(z);
        const double v = z.v;
        const Cd s = semicircle::stieltjes(z);
        const ComplexMatrix r = resolvent(W, z);
        const ComplexMatrix r2 = multiply(r, r);
        const Cd trace_r = r.trace();
        const Cd m = trace_r / nd;
        const Cd m_prime = r2.trace() / nd;
        const Cd lambda = m - s;

        const StieltjesSample spectral_path = stieltjes_of_spectrum(spectrum, z);

        IdentityLocation at{n, seed_tag, 0, z};

        // Cross-path consistency of m_n and m_n'.
        rep.record("mn_paths", rel(std::abs(m - spectral_path.m_n), std::abs(m)), at);
        rep.record("mn_prime_paths",
                   rel(std::abs(m_prime - spectral_path.m_n_prime),
                       std::abs(m_prime)),
                   at);

        Cd t_hat{};
        Cd eps4_rjj_sum{};

        // Row-level identities. Minor resolvents come from independent dense
        // solves of the deleted matrices, so both computation paths are
        // genuinely exercised.
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t del[] = {j};
            const ComplexMatrix r_minor = resolvent(principal_minor(W, del), z);
            std::vector<std::size_t> others = kept_indices(n, del);
            const RowTerms t = row_terms(W, j, others, r_minor, trace_r);
            const Cd r_jj = r.at(j, j);
            const Cd eps_hat = t.eps1 - t.eps2 - t.eps3 - t.eps4;
            t_hat += eps_hat * r_jj;
            eps4_rjj_sum += t.eps4 * r_jj;

            IdentityLocation loc{n, seed_tag, j, z};

            // (a) repr001 with the derivation-corrected signs.
            {
                const Cd lhs = (zc + m) * r_jj;
                const Cd rhs = -1.0 + eps_hat * r_jj;
                rep.record("repr001",
                           rel(std::abs(lhs - rhs),
                               std::abs(lhs) + std::abs(rhs)),
                           loc);
            }
            // (d) trace difference via the log-derivative of R_jj.
            {
                const Cd lhs = trace_r - t.minor_trace;
                const Cd rhs = r2.at(j, j) / r_jj;
                rep.record("trace_diff",
                           rel(std::abs(lhs - rhs), std::abs(lhs) + std::abs(rhs)),
                           loc);
            }
            // (e) eps4 via the eta expansion.
            {
                const Cd rhs = -(1.0 + t.eta1 + t.eta2 + t.eta3) * r_jj / nd;
                rep.record("eps4_eta",
                           rel(std::abs(t.eps4 - rhs),
                               std::abs(t.eps4) + std::abs(rhs)),
                           loc);
            }
            // Deterministic bounds on the resolvent diagonal.
            rep.record_inequality(
                "rjj_bound", rel(std::abs(r_jj) - 1.0 / v, 1.0 / v), loc);
            rep.record_inequality("rjj_imag_positive",
                                  rel(-r_jj.imag(), std::abs(r_jj)), loc);
            // |eps4| <= 1/(nv) almost surely.
            rep.record_inequality(
                "lem2.eps4_bound",
                rel(std::abs(t.eps4) - 1.0 / (nd * v), 1.0 / (nd * v)), loc);
        }

        IdentityLocation loc0{n, seed_tag, 0, z};
        t_hat /= nd;
        eps4_rjj_sum /= nd;

        // (b) quadratic self-consistency m^2 + z m + 1 = T_hat.
        {
            const Cd lhs = m * m + zc * m + 1.0;
            rep.record("quadratic_selfconsistency",
                       rel(std::abs(lhs - t_hat), std::abs(lhs) + std::abs(t_hat)),
                       loc0);
        }
        // (c) Lambda_n (z + m + s) = T_hat.
        {
            const Cd lhs = lambda * (zc + m + s);
            rep.record("lambda_repr",
                       rel(std::abs(lhs - t_hat), std::abs(lhs) + std::abs(t_hat)),
                       loc0);
        }
        // (f) (1/n) sum eps4 R_jj = -(1/n) m_n'.
        {
            const Cd rhs = -m_prime / nd;
            rep.record("deriv_sum",
                       rel(std::abs(eps4_rjj_sum - rhs),
                           std::abs(eps4_rjj_sum) + std::abs(rhs)),
                       loc0);
        }

        // resol00 battery. res1 is an equality when the sum runs over all
        // indices; the others hold with slack only.
        {
            double frob2 = 0.0;
            for (const Cd& x : r.data()) frob2 += std::norm(x);
            const double lhs = frob2 / nd;
            const double rhs = m.imag() / v;
            rep.record("resol00.res1_equality",
                       rel(std::abs(lhs - rhs), rhs), loc0);

            double res3 = 0.0, res5 = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
                double col = 0.0, col2 = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    col += std::norm(r.at(k, l));
                    col2 += std::norm(r2.at(k, l));
                    res5 += std::norm(r2.at(k, l));
                }
                res3 += std::norm(r2.at(l, l));
                const double cap = r.at(l, l).imag() / v;
                const double cap3 = r.at(l, l).imag() / (v * v * v);
                IdentityLocation lloc{n, seed_tag, l, z};
                rep.record_inequality("resol00.res2", rel(col - cap, cap), lloc);
                rep.record_inequality("resol00.res20", rel(col2 - cap3, cap3),
                                      lloc);
            }
            const double cap_m3 = m.imag() / (v * v * v);
            rep.record_inequality("resol00.res3", rel(res3 / nd - cap_m3, cap_m3),
                                  loc0);
            rep.record_inequality("resol00.res5", rel(res5 / nd - cap_m3, cap_m3),
                                  loc0);
        }

        // Vertical rescaling bound |R_jj(u + iv/s)| <= s |R_jj(u + iv)|.
        for (const double factor : {2.0, 4.0, 16.0}) {
            const UpperHalfPoint lower{z.u, z.v / factor};
            const ComplexMatrix r_low = resolvent(W, lower);
            std::string name = "schlein.s" + std::to_string(static_cast<int>(factor));
            for (std::size_t j = 0; j < n; ++j) {
                const double cap = factor * std::abs(r.at(j, j));
                rep.record_inequality(
                    name, rel(std::abs(r_low.at(j, j)) - cap, cap),
                    IdentityLocation{n, seed_tag, j, z});
            }
        }
    }
    return rep;
}

double lambda_solved_form_residual(const SymmetricMatrix& W,
                                   const UpperHalfPoint& z,
                                   std::span<const std::size_t> deleted) {
    require_upper_half(z, "lambda_solved_form_residual");
    const std::size_t n = W.dim();
    const double nd = static_cast<double>(n);
    const Cd zc = to_complex(z);
    const Cd s = semicircle::stieltjes(z);

    std::vector<std::size_t> keep = kept_indices(n, deleted);
    const std::size_t card_j = n - keep.size();

    const ComplexMatrix r_j = resolvent(principal_minor(W, deleted), z);
    const Cd m_j = r_j.trace() / nd;
    const Cd lambda = m_j - s;

    // T_hat over the rows of the minor ensemble.
    Cd t_hat{};
    for (std::size_t pos = 0; pos < keep.size(); ++pos) {
        const std::size_t j = keep[pos];
        std::vector<std::size_t> del2(deleted.begin(), deleted.end());
        del2.push_back(j);
        const ComplexMatrix r_jj_minor = resolvent(principal_minor(W, del2), z);
        std::vector<std::size_t> others;
        for (std::size_t k : keep) {
            if (k != j) others.push_back(k);
        }
        const RowTerms t = row_terms(W, j, others, r_jj_minor, r_j.trace());
        const Cd eps_hat = t.eps1 - t.eps2 - t.eps3 - t.eps4;
        t_hat += eps_hat * r_j.at(pos, pos);
    }
    t_hat /= nd;

    // Lambda solves Lambda^2 + sqrt(z^2-4) Lambda = T_hat + |J|/n; check the
    // distance to the nearest quadratic root.
    const Cd g = semicircle::sqrt_upper(zc * zc - 4.0);
    const Cd c = t_hat + static_cast<double>(card_j) / nd;
    const Cd disc = semicircle::sqrt_upper(g * g + 4.0 * c);
    const Cd root_a = 0.5 * (-g + disc);
    const Cd root_b = 0.5 * (-g - disc);
    const double dist =
        std::min(std::abs(lambda - root_a), std::abs(lambda - root_b));
    return rel(dist, std::abs(lambda));
}

std::vector<UpperHalfPoint> default_identity_grid() {
    return {
        {0.0, 1.0}, {0.5, 0.1}, {-1.0, 0.01},
        {1.5, 0.05}, {-0.3, 2.0}, {2.5, 0.5},
    };
}

std::vector<UpperHalfPoint> read_grid(std::istream& is) {
    std::vector<UpperHalfPoint> grid;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double u, v;
        if (ss >> u >> v) {
            UpperHalfPoint z{u, v};
            require_upper_half(z, "read_grid");
            grid.push_back(z);
        }
    }
    if (grid.empty()) throw std::runtime_error("read_grid: no points found");
    return grid;
}

void write_grid(std::ostream& os, std::span<const UpperHalfPoint> grid) {
    os.precision(17);
    os << "# identity-suite grid: one 'u v' pair per line\n";
    for (const auto& z : grid) os << z.u << ' ' << z.v << '\n';
}

void write_report(std::ostream& os, const IdentityReport& report) {
    os.precision(17);
    for (const auto& [name, e] : report.entries) {
        os << name << ".max_residual=" << e.max_residual << '\n';
        if (e.is_inequality) {
            os << name << ".violations=" << e.violations << '\n';
        }
        os << name << ".worst.n=" << e.worst.n << '\n';
        os << name << ".worst.seed=" << e.worst.seed << '\n';
        os << name << ".worst.j=" << e.worst.j << '\n';
        os << name << ".worst.z=" << e.worst.z.u << ',' << e.worst.z.v << '\n';
    }
    os << "hard_failures=" << report.hard_failures() << '\n';
}

}  // namespace wigner
