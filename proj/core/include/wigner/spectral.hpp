#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wigner/ensemble.hpp"

namespace wigner {

/// Sorted eigenvalues of one draw.
struct Spectrum {
    std::size_t n = 0;
    std::vector<double> lambdas;  // ascending
};

/// Step CDF with mass `weight` at each atom. For minors the weight stays
/// 1/n against the original dimension, so the total mass can be below 1.
struct ESD {
    double weight = 0.0;
    std::vector<double> atoms;  // sorted ascending

    double total_mass() const { return weight * static_cast<double>(atoms.size()); }
};

ESD esd_of(const Spectrum& s);
ESD esd_with_normalizer(const Spectrum& s, std::size_t normalizer);

/// Thrown when the QL iteration fails to deflate within the cap.
class EigenConvergenceError : public std::runtime_error {
  public:
    EigenConvergenceError(std::uint64_t matrix_hash, std::size_t index);
    std::uint64_t matrix_hash() const { return hash_; }

  private:
    std::uint64_t hash_;
};

/// Full spectrum via Householder tridiagonalization and implicit-shift QL
/// with deflation (iteration cap 60 per eigenvalue).
Spectrum eigenvalues(const SymmetricMatrix& W);

struct EigenDecomposition {
    Spectrum spectrum;
    std::size_t n = 0;
    std::vector<double> vectors;  // column q = eigenvector of lambda_q, row-major

    double vector_entry(std::size_t row, std::size_t q) const {
        return vectors[row * n + q];
    }
};

EigenDecomposition eigen_decomposition(const SymmetricMatrix& W);

/// Exact sup_x |F(x) - G(x)| against the semicircle law, evaluated at the
/// jump points and the mass deficit at +inf.
double kolmogorov_distance(const ESD& f);

/// Exact sup_x |F(x) - H(x)| between two step functions.
double staircase_distance(const ESD& f, const ESD& h);

/// Pools replicate spectra (all the same n) with weight 1/(n R).
ESD mean_esd(std::span<const Spectrum> spectra);

struct RigidityRow {
    std::size_t j;      // 1-based index
    double gamma_nj;    // semicircle quantile at j/n
    double ratio;       // |lambda_j - gamma_nj| / (min(j, n-j+1)^(-1/3) n^(-2/3))
};

/// Deviation of each eigenvalue from its quantile, in edge-weighted units.
/// Diagnostic only: the profile is reported, never thresholded.
std::vector<RigidityRow> rigidity_profile(const Spectrum& s);

}  // namespace wigner
