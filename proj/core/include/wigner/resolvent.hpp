#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wigner/ensemble.hpp"
#include "wigner/semicircle.hpp"
#include "wigner/spectral.hpp"

namespace wigner {

using Cd = std::complex<double>;

/// Dense complex matrix, row-major.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), a_(n * n) {}

    std::size_t dim() const { return n_; }
    Cd& at(std::size_t j, std::size_t k) { return a_[j * n_ + k]; }
    const Cd& at(std::size_t j, std::size_t k) const { return a_[j * n_ + k]; }

    Cd trace() const;
    std::span<const Cd> data() const { return a_; }

  private:
    std::size_t n_ = 0;
    std::vector<Cd> a_;
};

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);

/// R(z) = (W - zI)^(-1) by dense LU with partial pivoting. Always well
/// defined for v > 0.
ComplexMatrix resolvent(const SymmetricMatrix& W, const UpperHalfPoint& z);

/// Diagonal of the resolvent; |R_jj| <= 1/v and Im R_jj > 0.
std::vector<Cd> resolvent_diag(const SymmetricMatrix& W, const UpperHalfPoint& z);

/// m_n, m_n', s and Lambda_n = m_n - s at one point, from a spectrum.
struct StieltjesSample {
    UpperHalfPoint z;
    Cd m_n;        // (1/n) sum 1/(lambda_j - z)
    Cd m_n_prime;  // (1/n) sum 1/(lambda_j - z)^2
    Cd s;          // semicircle transform
    Cd lambda_n;   // m_n - s
};

StieltjesSample stieltjes_of_spectrum(const Spectrum& s, const UpperHalfPoint& z);

/// The displayed sum eps_1+eps_2+eps_3+eps_4 does not close the resolvent
/// identity; the derivation forces eps_1-eps_2-eps_3-eps_4, which is what
/// every identity below uses.
enum class EpsilonSign { displayed_sum, derivation_corrected };

/// Row-wise Schur-complement error terms at one (z, j).
struct EpsilonDecomposition {
    std::size_t j;
    Cd eps1;  // X_jj / sqrt(n)
    Cd eps2;  // (1/n) sum_{k != l} X_jk X_jl R^(j)_kl
    Cd eps3;  // (1/n) sum_k (X_jk^2 - 1) R^(j)_kk
    Cd eps4;  // (1/n)(Tr R^(j) - Tr R)
    Cd eta1;  // (1/n) Tr (R^(j))^2
    Cd eta2;  // (1/n) sum_{k != l} X_jk X_jl [(R^(j))^2]_kl
    Cd eta3;  // (1/n) sum_k (X_jk^2 - 1) [(R^(j))^2]_kk
    Cd r_jj;
    Cd minor_trace;  // Tr R^(j)
    EpsilonSign sign_convention;

    /// eps1 - eps2 - eps3 - eps4.
    Cd eps_hat() const { return eps1 - eps2 - eps3 - eps4; }
};

EpsilonDecomposition epsilon_decomposition(const SymmetricMatrix& W,
                                           const UpperHalfPoint& z, std::size_t j);

struct IdentityLocation {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t j = 0;
    UpperHalfPoint z{0.0, 1.0};
};

struct IdentityEntry {
    double max_residual = 0.0;
    IdentityLocation worst;
    bool is_inequality = false;   // residual counts slack violations
    std::size_t violations = 0;   // inequality breaches beyond slack
};

/// Max-residual table keyed by identity name; merging keeps the worst case,
/// so fan-out order never changes the result.
struct IdentityReport {
    std::map<std::string, IdentityEntry> entries;

    void record(const std::string& name, double residual,
                const IdentityLocation& loc);
    void record_inequality(const std::string& name, double excess,
                           const IdentityLocation& loc);
    void merge(const IdentityReport& other);
    std::size_t hard_failures() const;
    double max_residual() const;
};

/// Relative slack allowed on the deterministic inequalities.
inline constexpr double kInequalitySlack = 1e-12;

/// Evaluates the Schur-complement identities (repr001, the quadratic
/// self-consistency, the Lambda representation, trace-difference, the
/// eta expansion of eps_4, the derivative identity) plus the deterministic
/// inequality battery (resolvent L2 rows, the eps_4 bound, the vertical
/// rescaling bound at s in {2,4,16}) on one draw across a z grid.
IdentityReport identity_report(const SymmetricMatrix& W,
                               std::span<const UpperHalfPoint> grid,
                               std::uint64_t seed_tag);

/// Residual of the solved quadratic for Lambda_n on the minor with rows
/// `deleted` removed: Lambda^2 + sqrt(z^2-4) Lambda = T_hat + |J|/n,
/// reported as the distance from Lambda to the nearest quadratic root.
double lambda_solved_form_residual(const SymmetricMatrix& W,
                                   const UpperHalfPoint& z,
                                   std::span<const std::size_t> deleted);

/// Default z grid used by the identity suite (kept in data/identity_grid.txt).
std::vector<UpperHalfPoint> default_identity_grid();

std::vector<UpperHalfPoint> read_grid(std::istream& is);
void write_grid(std::ostream& os, std::span<const UpperHalfPoint> grid);

/// Flat key/value serialization consumed by the verify subcommand.
void write_report(std::ostream& os, const IdentityReport& report);

}  // namespace wigner
