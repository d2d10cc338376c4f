#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wigner/ensemble.hpp"
#include "wigner/region_bounds.hpp"
#include "wigner/resolvent.hpp"
#include "wigner/spectral.hpp"

namespace wigner {

enum class OutputFormat { csv, json };

struct ExperimentConfig {
    std::vector<std::size_t> n_list;       // strictly increasing
    std::vector<std::size_t> replicates;   // empty: rule max(32, 2^18/n);
                                           // one value: broadcast; else per n
    EntryLaw law = EntryLaw::gaussian();
    bool apply_pipeline = false;
    double d0 = 2.0;
    double a0 = 1.0;
    std::uint64_t seed = 0;
    std::string out_path;
    OutputFormat format = OutputFormat::csv;
    std::size_t threads = 0;               // 0: hardware concurrency
    bool stable_timing = false;            // record wall_seconds as 0
};

void validate(const ExperimentConfig& cfg);

/// Work-equalizing default: max(32, 2^18 / n).
std::size_t default_replicates(std::size_t n);
std::size_t replicates_for(const ExperimentConfig& cfg, std::size_t index);

struct RateSweepRecord {
    std::size_t n = 0;
    std::size_t replicates = 0;
    double delta_n = 0.0;          // Kolmogorov distance of the pooled ESD
    double delta_star_mean = 0.0;  // mean per-replicate distance
    double bootstrap_se = 0.0;     // 200-resample bootstrap SE of delta_n
    double n_times_delta = 0.0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

using MatrixSource =
    std::function<SymmetricMatrix(std::size_t n, std::uint64_t seed)>;

MatrixSource ensemble_source(const ExperimentConfig& cfg);

std::vector<RateSweepRecord> run_rate_sweep(const ExperimentConfig& cfg);
std::vector<RateSweepRecord> run_rate_sweep(const ExperimentConfig& cfg,
                                            const MatrixSource& source);

struct StieltjesSweepRecord {
    std::size_t n = 0;
    UpperHalfPoint z;
    Cd mean_m;      // Monte Carlo mean of m_n(z)
    Cd s;
    Cd lambda;      // mean_m - s
    double envelope_ratio = 0.0;
};

std::vector<StieltjesSweepRecord> run_stieltjes_sweep(const ExperimentConfig& cfg,
                                                      std::size_t u_count = 9,
                                                      std::size_t v_count = 7);
std::vector<StieltjesSweepRecord> run_stieltjes_sweep(const ExperimentConfig& cfg,
                                                      const MatrixSource& source,
                                                      std::size_t u_count,
                                                      std::size_t v_count);

double max_envelope_ratio(std::span<const StieltjesSweepRecord> records,
                          std::size_t n);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares of log(delta_n) on log(n); needs >= 3 distinct n with
/// positive delta.
ExponentFit fit_exponent(std::span<const RateSweepRecord> records);

/// CSV schema (exact column order):
/// n,replicates,delta_n,delta_star_mean,bootstrap_se,n_times_delta,wall_seconds,seed
void emit_csv(std::span<const RateSweepRecord> records, std::ostream& os);
std::vector<RateSweepRecord> parse_csv(std::istream& is);
void emit_json(std::span<const RateSweepRecord> records, std::ostream& os);
std::vector<RateSweepRecord> parse_json(std::istream& is);

/// Writes in the configured format; I/O failures carry the path.
void write_records(std::span<const RateSweepRecord> records,
                   OutputFormat format, const std::string& path);

void emit_stieltjes_csv(std::span<const StieltjesSweepRecord> records,
                        std::ostream& os);

/// Runs fn(0..count-1) across up to `threads` workers. Each index writes
/// only its own slot, so results never depend on the schedule.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace wigner
