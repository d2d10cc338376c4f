#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wigner/rng.hpp"

namespace wigner {

/// One atom of a discrete entry law.
struct LawAtom {
    double x;
    double p;
};

enum class LawTag { gaussian, rademacher, uniform_scaled, custom_discrete };

/// Truncated-moment summary for entries capped at |x| <= threshold.
struct TruncatedMoments {
    double mean;     // E X 1{|X|<=t}
    double second;   // E X^2 1{|X|<=t}
    double sigma2;   // second - mean^2
};

/// Mean-zero unit-variance entry law with analytically known moments.
class EntryLaw {
  public:
    static EntryLaw gaussian();
    static EntryLaw rademacher();
    static EntryLaw uniform_scaled();
    /// Throws unless the atoms form a probability law with mean 0 and
    /// variance 1 to 1e-12.
    static EntryLaw custom_discrete(std::vector<LawAtom> atoms);

    LawTag tag() const { return tag_; }
    const std::string& name() const { return name_; }

    double sample(SplitMix64& stream) const;

    double mu4() const;
    double mu8() const;

    /// Largest |x| the law can produce; +inf for gaussian.
    double max_abs_support() const;

    /// Exact moments of the law truncated at |x| <= threshold.
    TruncatedMoments truncated_moments(double threshold) const;

    const std::vector<LawAtom>& atoms() const { return atoms_; }

  private:
    EntryLaw(LawTag tag, std::string name) : tag_(tag), name_(std::move(name)) {}

    LawTag tag_;
    std::string name_;
    std::vector<LawAtom> atoms_;       // custom_discrete only
    std::vector<double> atom_cdf_;     // sampling table for custom_discrete
};

/// Full description of one ensemble draw.
struct WignerSpec {
    std::size_t n = 1;
    EntryLaw law = EntryLaw::gaussian();
    std::uint64_t seed = 0;
    double d0 = 2.0;             // truncation constant, threshold d0 * n^(1/4)
    bool apply_pipeline = false;
};

void validate(const WignerSpec& spec);

/// Dense real symmetric matrix; (j,k) and (k,j) always hold the same bits.
class SymmetricMatrix {
  public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t dim() const { return n_; }
    double operator()(std::size_t j, std::size_t k) const { return a_[j * n_ + k]; }
    void set(std::size_t j, std::size_t k, double v) {
        a_[j * n_ + k] = v;
        a_[k * n_ + j] = v;
    }

    std::span<const double> data() const { return a_; }
    std::span<double> raw() { return a_; }

    double frobenius_norm() const;
    double max_abs() const;
    bool exactly_symmetric() const;

    /// Order-independent content hash, used to identify failing draws.
    std::uint64_t content_hash() const;

  private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Draws the unscaled entry matrix X: upper triangle (diagonal included)
/// i.i.d. from the law, mirrored. Entry (j,k) depends only on
/// (seed, j, k), never on sampling order.
SymmetricMatrix sample_entries(const WignerSpec& spec);

struct PipelineOutput {
    SymmetricMatrix truncated;     // X^: entries above the threshold zeroed
    SymmetricMatrix centered;      // X~ = X^ - E X^
    SymmetricMatrix standardized;  // X˘ = X~ / sigma
    double threshold;              // c * n^(1/4)
    double mean_hat;               // E X^
    double sigma;                  // sqrt(E X^2 - (E X^)^2), in (0, 1]
    std::size_t entries_zeroed;    // count over the full matrix
    bool analytic_moments;         // always true for the built-in laws
};

/// Truncation / centering / rescaling pipeline at threshold c * n^(1/4).
/// Throws when the truncated law is degenerate (sigma = 0), naming the law.
PipelineOutput standardize_pipeline(const SymmetricMatrix& X, const EntryLaw& law,
                                    double c);

/// W = X / sqrt(n).
SymmetricMatrix assemble(const SymmetricMatrix& X);

/// Deletes the rows and columns listed in `deleted` (deduplicated).
SymmetricMatrix principal_minor(const SymmetricMatrix& W,
                                std::span<const std::size_t> deleted);

/// Samples X per spec and applies scaling (and the pipeline when requested).
SymmetricMatrix sample_wigner(const WignerSpec& spec);

/// Plain-text dump: header "n=<n>" then n whitespace-separated rows at full
/// decimal precision; read_matrix is the lossless inverse.
void write_matrix(std::ostream& os, const SymmetricMatrix& m);
SymmetricMatrix read_matrix(std::istream& is);

EntryLaw law_from_name(const std::string& name);

}  // namespace wigner
