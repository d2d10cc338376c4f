#include "wigner/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wigner {

namespace {

constexpr double kMomentTol = 1e-12;

double phi(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

EntryLaw EntryLaw::gaussian() { return EntryLaw(LawTag::gaussian, "gaussian"); }

EntryLaw EntryLaw::rademacher() {
    return EntryLaw(LawTag::rademacher, "rademacher");
}

EntryLaw EntryLaw::uniform_scaled() {
    return EntryLaw(LawTag::uniform_scaled, "uniform-scaled");
}

EntryLaw EntryLaw::custom_discrete(std::vector<LawAtom> atoms) {
    if (atoms.empty()) {
        throw std::invalid_argument("custom_discrete: no atoms");
    }
    double mass = 0.0, mean = 0.0, second = 0.0;
    for (const auto& a : atoms) {
        if (!std::isfinite(a.x) || !std::isfinite(a.p) || a.p <= 0.0) {
            throw std::invalid_argument("custom_discrete: bad atom");
        }
        mass += a.p;
        mean += a.p * a.x;
        second += a.p * a.x * a.x;
    }
    if (std::abs(mass - 1.0) > kMomentTol || std::abs(mean) > kMomentTol ||
        std::abs(second - 1.0) > kMomentTol) {
        throw std::invalid_argument(
            "custom_discrete: atoms must carry total mass 1, mean 0, variance 1");
    }
    EntryLaw law(LawTag::custom_discrete, "custom-discrete");
    std::sort(atoms.begin(), atoms.end(),
              [](const LawAtom& a, const LawAtom& b) { return a.x < b.x; });
    law.atoms_ = std::move(atoms);
    double cum = 0.0;
    for (const auto& a : law.atoms_) {
        cum += a.p;
        law.atom_cdf_.push_back(cum);
    }
    law.atom_cdf_.back() = 1.0;
    return law;
}

double EntryLaw::sample(SplitMix64& stream) const {
    switch (tag_) {
        case LawTag::gaussian: {
            const double u1 = stream.uniform01_open_low();
            const double u2 = stream.uniform01();
            return std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
        }
        case LawTag::rademacher:
            return (stream.next() & 1ULL) ? 1.0 : -1.0;
        case LawTag::uniform_scaled:
            return (2.0 * stream.uniform01() - 1.0) * std::numbers::sqrt3;
        case LawTag::custom_discrete: {
            const double u = stream.uniform01();
            const auto it =
                std::lower_bound(atom_cdf_.begin(), atom_cdf_.end(), u);
            const std::size_t idx = static_cast<std::size_t>(
                std::min<std::ptrdiff_t>(it - atom_cdf_.begin(),
                                         static_cast<std::ptrdiff_t>(atoms_.size()) - 1));
            return atoms_[idx].x;
        }
    }
    throw std::logic_error("EntryLaw::sample: unreachable");
}

double EntryLaw::mu4() const {
    switch (tag_) {
        case LawTag::gaussian: return 3.0;
        case LawTag::rademacher: return 1.0;
        case LawTag::uniform_scaled: return 9.0 / 5.0;
        case LawTag::custom_discrete: {
            double m = 0.0;
            for (const auto& a : atoms_) m += a.p * std::pow(a.x, 4);
            return m;
        }
    }
    throw std::logic_error("EntryLaw::mu4: unreachable");
}

double EntryLaw::mu8() const {
    switch (tag_) {
        case LawTag::gaussian: return 105.0;
        case LawTag::rademacher: return 1.0;
        case LawTag::uniform_scaled: return 9.0;  // 3^4 / 9
        case LawTag::custom_discrete: {
            double m = 0.0;
            for (const auto& a : atoms_) m += a.p * std::pow(a.x, 8);
            return m;
        }
    }
    throw std::logic_error("EntryLaw::mu8: unreachable");
}

double EntryLaw::max_abs_support() const {
    switch (tag_) {
        case LawTag::gaussian:
            return std::numeric_limits<double>::infinity();
        case LawTag::rademacher: return 1.0;
        case LawTag::uniform_scaled: return std::numbers::sqrt3;
        case LawTag::custom_discrete: {
            double m = 0.0;
            for (const auto& a : atoms_) m = std::max(m, std::abs(a.x));
            return m;
        }
    }
    throw std::logic_error("EntryLaw::max_abs_support: unreachable");
}

TruncatedMoments EntryLaw::truncated_moments(double t) const {
    if (!(t > 0.0)) {
        throw std::invalid_argument("truncated_moments: threshold must be > 0");
    }
    TruncatedMoments m{0.0, 0.0, 0.0};
    switch (tag_) {
        case LawTag::gaussian:
            // int_{-t}^{t} x^2 phi(x) dx = erf(t/sqrt(2)) - 2 t phi(t)
            m.mean = 0.0;
            m.second = std::erf(t / std::numbers::sqrt2) - 2.0 * t * phi(t);
            break;
        case LawTag::rademacher:
            if (t >= 1.0) m.second = 1.0;
            break;
        case LawTag::uniform_scaled:
            if (t >= std::numbers::sqrt3) {
                m.second = 1.0;
            } else {
                m.second = t * t * t / (3.0 * std::numbers::sqrt3);
            }
            break;
        case LawTag::custom_discrete:
            for (const auto& a : atoms_) {
                if (std::abs(a.x) <= t) {
                    m.mean += a.p * a.x;
                    m.second += a.p * a.x * a.x;
                }
            }
            break;
    }
    m.sigma2 = m.second - m.mean * m.mean;
    return m;
}

void validate(const WignerSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("WignerSpec: n must be >= 1");
    if (!(spec.d0 > 0.0)) {
        throw std::invalid_argument("WignerSpec: D0 must be positive");
    }
}

double SymmetricMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double x : a_) s += x * x;
    return std::sqrt(s);
}

double SymmetricMatrix::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

bool SymmetricMatrix::exactly_symmetric() const {
    for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t k = j + 1; k < n_; ++k) {
            if (a_[j * n_ + k] != a_[k * n_ + j]) return false;
        }
    }
    return true;
}

std::uint64_t SymmetricMatrix::content_hash() const {
    std::uint64_t h = mix64(n_);
    for (double x : a_) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof x);
        std::memcpy(&bits, &x, sizeof bits);
        h = mix64(h ^ bits);
    }
    return h;
}

SymmetricMatrix sample_entries(const WignerSpec& spec) {
    validate(spec);
    SymmetricMatrix X(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        for (std::size_t k = j; k < spec.n; ++k) {
            SplitMix64 stream = entry_stream(spec.seed, j, k);
            X.set(j, k, spec.law.sample(stream));
        }
    }
    return X;
}

PipelineOutput standardize_pipeline(const SymmetricMatrix& X, const EntryLaw& law,
                                    double c) {
    if (!(c > 0.0)) {
        throw std::invalid_argument("standardize_pipeline: c must be positive");
    }
    const std::size_t n = X.dim();
    const double t = c * std::pow(static_cast<double>(n), 0.25);
    const TruncatedMoments tm = law.truncated_moments(t);
    if (!(tm.sigma2 > 0.0)) {
        throw std::runtime_error(
            "standardize_pipeline: truncation at " + std::to_string(t) +
            " degenerates the '" + law.name() + "' law (sigma = 0)");
    }

    PipelineOutput out;
    out.threshold = t;
    out.mean_hat = tm.mean;
    out.sigma = std::sqrt(tm.sigma2);
    out.entries_zeroed = 0;
    out.analytic_moments = true;
    out.truncated = SymmetricMatrix(n);
    out.centered = SymmetricMatrix(n);
    out.standardized = SymmetricMatrix(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
            const double x = X(j, k);
            const double xh = (std::abs(x) <= t) ? x : 0.0;
            if (xh != x) out.entries_zeroed += (j == k) ? 1 : 2;
            const double xt = xh - tm.mean;
            out.truncated.set(j, k, xh);
            out.centered.set(j, k, xt);
            out.standardized.set(j, k, xt / out.sigma);
        }
    }
    return out;
}

SymmetricMatrix assemble(const SymmetricMatrix& X) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(X.dim()));
    SymmetricMatrix W(X.dim());
    for (std::size_t j = 0; j < X.dim(); ++j) {
        for (std::size_t k = j; k < X.dim(); ++k) {
            W.set(j, k, X(j, k) * inv);
        }
    }
    return W;
}

SymmetricMatrix principal_minor(const SymmetricMatrix& W,
                                std::span<const std::size_t> deleted) {
    const std::size_t n = W.dim();
    std::vector<std::size_t> del(deleted.begin(), deleted.end());
    std::sort(del.begin(), del.end());
    del.erase(std::unique(del.begin(), del.end()), del.end());
    for (std::size_t d : del) {
        if (d >= n) {
            throw std::invalid_argument("principal_minor: index out of range");
        }
    }
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
    SymmetricMatrix M(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        for (std::size_t k = j; k < keep.size(); ++k) {
            M.set(j, k, W(keep[j], keep[k]));
        }
    }
    return M;
}

SymmetricMatrix sample_wigner(const WignerSpec& spec) {
    SymmetricMatrix X = sample_entries(spec);
    if (spec.apply_pipeline) {
        PipelineOutput p = standardize_pipeline(X, spec.law, spec.d0);
        X = std::move(p.standardized);
    }
    return assemble(X);
}

void write_matrix(std::ostream& os, const SymmetricMatrix& m) {
    os << "n=" << m.dim() << '\n';
    os.precision(17);
    for (std::size_t j = 0; j < m.dim(); ++j) {
        for (std::size_t k = 0; k < m.dim(); ++k) {
            if (k) os << ' ';
            os << m(j, k);
        }
        os << '\n';
    }
}

SymmetricMatrix read_matrix(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("n=", 0) != 0) {
        throw std::runtime_error("read_matrix: missing 'n=<n>' header");
    }
    std::size_t n = 0;
    try {
        n = std::stoul(header.substr(2));
    } catch (const std::exception&) {
        throw std::runtime_error("read_matrix: bad dimension in header");
    }
    SymmetricMatrix m(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            double v;
            if (!(is >> v)) {
                throw std::runtime_error("read_matrix: truncated matrix body");
            }
            m.raw()[j * n + k] = v;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            if (m(j, k) != m(k, j)) {
                throw std::runtime_error("read_matrix: matrix is not symmetric");
            }
        }
    }
    return m;
}

EntryLaw law_from_name(const std::string& name) {
    if (name == "gaussian") return EntryLaw::gaussian();
    if (name == "rademacher") return EntryLaw::rademacher();
    if (name == "uniform-scaled" || name == "uniform") {
        return EntryLaw::uniform_scaled();
    }
    throw std::invalid_argument("unknown entry law '" + name +
                                "' (expected gaussian, rademacher, uniform-scaled)");
}

}  // namespace wigner
