#include "wigner/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wigner/semicircle.hpp"

#include <json.hpp>

namespace wigner {

namespace {

constexpr std::size_t kBootstrapResamples = 200;
constexpr char kCsvHeader[] =
    "n,replicates,delta_n,delta_star_mean,bootstrap_se,n_times_delta,"
    "wall_seconds,seed";

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

struct PooledAtom {
    double lambda;
    double g;            // semicircle CDF at lambda
    std::uint32_t rep;
};

/// Exact sup |F* - G| for the resample whose replicate multiplicities are
/// `counts`, over the pre-sorted pooled atoms.
double resample_distance(std::span<const PooledAtom> atoms,
                         std::span<const std::uint32_t> counts,
                         double atom_weight) {
    double cum = 0.0;
    double dist = 0.0;
    for (const PooledAtom& a : atoms) {
        const double jump = atom_weight * static_cast<double>(counts[a.rep]);
        dist = std::max(dist, std::abs(cum - a.g));
        cum += jump;
        dist = std::max(dist, std::abs(cum - a.g));
    }
    return std::max(dist, std::abs(cum - 1.0));
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    if (cfg.n_list.empty()) {
        throw std::invalid_argument("ExperimentConfig: empty n_list");
    }
    for (std::size_t i = 0; i + 1 < cfg.n_list.size(); ++i) {
        if (cfg.n_list[i] >= cfg.n_list[i + 1]) {
            throw std::invalid_argument(
                "ExperimentConfig: n_list must be strictly increasing");
        }
    }
    if (!cfg.replicates.empty() && cfg.replicates.size() != 1 &&
        cfg.replicates.size() != cfg.n_list.size()) {
        throw std::invalid_argument(
            "ExperimentConfig: replicates must be empty, one value, or one per n");
    }
    for (std::size_t r : cfg.replicates) {
        if (r < 1) {
            throw std::invalid_argument("ExperimentConfig: replicates must be >= 1");
        }
    }
    if (!(cfg.a0 > 0.0)) {
        throw std::invalid_argument("ExperimentConfig: A0 must be positive");
    }
}

std::size_t default_replicates(std::size_t n) {
    return std::max<std::size_t>(32, (std::size_t{1} << 18) / std::max<std::size_t>(n, 1));
}

std::size_t replicates_for(const ExperimentConfig& cfg, std::size_t index) {
    if (cfg.replicates.empty()) return default_replicates(cfg.n_list[index]);
    if (cfg.replicates.size() == 1) return cfg.replicates[0];
    return cfg.replicates[index];
}

MatrixSource ensemble_source(const ExperimentConfig& cfg) {
    return [law = cfg.law, pipeline = cfg.apply_pipeline,
            d0 = cfg.d0](std::size_t n, std::uint64_t seed) {
        WignerSpec spec{n, law, seed, d0, pipeline};
        return sample_wigner(spec);
    };
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(resolve_threads(threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<RateSweepRecord> run_rate_sweep(const ExperimentConfig& cfg) {
    return run_rate_sweep(cfg, ensemble_source(cfg));
}

std::vector<RateSweepRecord> run_rate_sweep(const ExperimentConfig& cfg,
                                            const MatrixSource& source) {
    validate(cfg);
    std::vector<RateSweepRecord> records;
    records.reserve(cfg.n_list.size());

    for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
        const std::size_t n = cfg.n_list[idx];
        const std::size_t reps = replicates_for(cfg, idx);
        const auto start = std::chrono::steady_clock::now();

        std::vector<Spectrum> spectra(reps);
        std::vector<double> delta_star(reps);
        parallel_for(reps, cfg.threads, [&](std::size_t r) {
            const std::uint64_t rep_seed = derive_seed(cfg.seed, n, r);
            try {
                const SymmetricMatrix w = source(n, rep_seed);
                spectra[r] = eigenvalues(w);
                delta_star[r] = kolmogorov_distance(esd_of(spectra[r]));
            } catch (const EigenConvergenceError& e) {
                throw std::runtime_error(
                    "rate sweep: replicate " + std::to_string(r) + " at n=" +
                    std::to_string(n) + " (derived seed " +
                    std::to_string(rep_seed) + ") failed: " + e.what());
            }
        });

        const ESD pooled = mean_esd(spectra);
        RateSweepRecord rec;
        rec.n = n;
        rec.replicates = reps;
        rec.seed = cfg.seed;
        rec.delta_n = kolmogorov_distance(pooled);
        rec.delta_star_mean =
            std::accumulate(delta_star.begin(), delta_star.end(), 0.0) /
            static_cast<double>(reps);
        rec.n_times_delta = static_cast<double>(n) * rec.delta_n;

        // sup of the mean never exceeds the mean of the sups
        if (rec.delta_star_mean < rec.delta_n - 1e-12) {
            throw std::logic_error("rate sweep: pooled distance exceeded the "
                                   "mean per-replicate distance");
        }

        // Bootstrap over replicates for the SE of delta_n.
        {
            std::vector<PooledAtom> atoms;
            atoms.reserve(n * reps);
            for (std::uint32_t r = 0; r < reps; ++r) {
                for (double lambda : spectra[r].lambdas) {
                    atoms.push_back({lambda, semicircle::cdf(lambda), r});
                }
            }
            std::sort(atoms.begin(), atoms.end(),
                      [](const PooledAtom& a, const PooledAtom& b) {
                          return a.lambda < b.lambda;
                      });
            const double atom_weight =
                1.0 / (static_cast<double>(n) * static_cast<double>(reps));
            SplitMix64 rng(derive_seed(cfg.seed, n, 0xB007'57A9ULL));
            std::vector<std::uint32_t> counts(reps);
            std::vector<double> resampled;
            resampled.reserve(kBootstrapResamples);
            for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
                std::fill(counts.begin(), counts.end(), 0);
                for (std::size_t r = 0; r < reps; ++r) {
                    counts[rng.next() % reps]++;
                }
                resampled.push_back(resample_distance(atoms, counts, atom_weight));
            }
            const double mean =
                std::accumulate(resampled.begin(), resampled.end(), 0.0) /
                static_cast<double>(resampled.size());
            double var = 0.0;
            for (double d : resampled) var += (d - mean) * (d - mean);
            rec.bootstrap_se =
                std::sqrt(var / static_cast<double>(resampled.size() - 1));
        }

        const auto stop = std::chrono::steady_clock::now();
        rec.wall_seconds =
            cfg.stable_timing
                ? 0.0
                : std::chrono::duration<double>(stop - start).count();
        records.push_back(rec);
    }
    return records;
}

std::vector<StieltjesSweepRecord> run_stieltjes_sweep(const ExperimentConfig& cfg,
                                                      std::size_t u_count,
                                                      std::size_t v_count) {
    return run_stieltjes_sweep(cfg, ensemble_source(cfg), u_count, v_count);
}

std::vector<StieltjesSweepRecord> run_stieltjes_sweep(const ExperimentConfig& cfg,
                                                      const MatrixSource& source,
                                                      std::size_t u_count,
                                                      std::size_t v_count) {
    validate(cfg);
    std::vector<StieltjesSweepRecord> records;

    for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
        const std::size_t n = cfg.n_list[idx];
        const std::size_t reps = replicates_for(cfg, idx);
        const std::vector<UpperHalfPoint> grid =
            region_grid(make_region(n, cfg.a0, u_count, v_count));

        std::vector<std::vector<Cd>> per_replicate(reps);
        parallel_for(reps, cfg.threads, [&](std::size_t r) {
            const std::uint64_t rep_seed = derive_seed(cfg.seed, n, r);
            try {
                const SymmetricMatrix w = source(n, rep_seed);
                const Spectrum s = eigenvalues(w);
                std::vector<Cd> values(grid.size());
                for (std::size_t g = 0; g < grid.size(); ++g) {
                    values[g] = stieltjes_of_spectrum(s, grid[g]).m_n;
                }
                per_replicate[r] = std::move(values);
            } catch (const EigenConvergenceError& e) {
                throw std::runtime_error(
                    "stieltjes sweep: replicate " + std::to_string(r) + " at n=" +
                    std::to_string(n) + " (derived seed " +
                    std::to_string(rep_seed) + ") failed: " + e.what());
            }
        });

        for (std::size_t g = 0; g < grid.size(); ++g) {
            Cd sum{};
            for (std::size_t r = 0; r < reps; ++r) sum += per_replicate[r][g];
            StieltjesSweepRecord rec;
            rec.n = n;
            rec.z = grid[g];
            rec.mean_m = sum / static_cast<double>(reps);
            rec.s = semicircle::stieltjes(grid[g]);
            rec.lambda = rec.mean_m - rec.s;
            rec.envelope_ratio = envelope_ratio(rec.lambda, n, grid[g]);
            records.push_back(rec);
        }
    }
    return records;
}

double max_envelope_ratio(std::span<const StieltjesSweepRecord> records,
                          std::size_t n) {
    double best = 0.0;
    bool found = false;
    for (const auto& rec : records) {
        if (rec.n == n) {
            best = std::max(best, rec.envelope_ratio);
            found = true;
        }
    }
    if (!found) {
        throw std::invalid_argument("max_envelope_ratio: no records for n=" +
                                    std::to_string(n));
    }
    return best;
}

ExponentFit fit_exponent(std::span<const RateSweepRecord> records) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& rec : records) {
        if (rec.delta_n <= 0.0) continue;
        pts.emplace_back(std::log(static_cast<double>(rec.n)),
                         std::log(rec.delta_n));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](auto& a, auto& b) { return a.first == b.first; }),
              pts.end());
    if (pts.size() < 3) {
        throw std::invalid_argument(
            "fit_exponent: need >= 3 records with distinct n and delta_n > 0");
    }
    const double m = static_cast<double>(pts.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    ExponentFit fit;
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / m;
    for (auto [x, y] : pts) {
        const double yhat = fit.intercept + fit.slope * x;
        ss_res += (y - yhat) * (y - yhat);
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r2 = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

void emit_csv(std::span<const RateSweepRecord> records, std::ostream& os) {
    os << kCsvHeader << '\n';
    os.precision(17);
    for (const auto& r : records) {
        os << r.n << ',' << r.replicates << ',' << r.delta_n << ','
           << r.delta_star_mean << ',' << r.bootstrap_se << ','
           << r.n_times_delta << ',' << r.wall_seconds << ',' << r.seed << '\n';
    }
}

std::vector<RateSweepRecord> parse_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) {
        throw std::runtime_error("parse_csv: bad or missing header");
    }
    std::vector<RateSweepRecord> records;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8) {
            throw std::runtime_error("parse_csv: expected 8 fields, got " +
                                     std::to_string(fields.size()));
        }
        RateSweepRecord r;
        r.n = std::stoul(fields[0]);
        r.replicates = std::stoul(fields[1]);
        r.delta_n = std::stod(fields[2]);
        r.delta_star_mean = std::stod(fields[3]);
        r.bootstrap_se = std::stod(fields[4]);
        r.n_times_delta = std::stod(fields[5]);
        r.wall_seconds = std::stod(fields[6]);
        r.seed = std::stoull(fields[7]);
        records.push_back(r);
    }
    return records;
}

void emit_json(std::span<const RateSweepRecord> records, std::ostream& os) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : records) {
        doc.push_back({{"n", r.n},
                       {"replicates", r.replicates},
                       {"delta_n", r.delta_n},
                       {"delta_star_mean", r.delta_star_mean},
                       {"bootstrap_se", r.bootstrap_se},
                       {"n_times_delta", r.n_times_delta},
                       {"wall_seconds", r.wall_seconds},
                       {"seed", r.seed}});
    }
    os << doc.dump(2) << '\n';
}

std::vector<RateSweepRecord> parse_json(std::istream& is) {
    nlohmann::json doc = nlohmann::json::parse(is);
    std::vector<RateSweepRecord> records;
    for (const auto& item : doc) {
        RateSweepRecord r;
        r.n = item.at("n").get<std::size_t>();
        r.replicates = item.at("replicates").get<std::size_t>();
        r.delta_n = item.at("delta_n").get<double>();
        r.delta_star_mean = item.at("delta_star_mean").get<double>();
        r.bootstrap_se = item.at("bootstrap_se").get<double>();
        r.n_times_delta = item.at("n_times_delta").get<double>();
        r.wall_seconds = item.at("wall_seconds").get<double>();
        r.seed = item.at("seed").get<std::uint64_t>();
        records.push_back(r);
    }
    return records;
}

void write_records(std::span<const RateSweepRecord> records,
                   OutputFormat format, const std::string& path) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("write_records: cannot open '" + path + "'");
    }
    if (format == OutputFormat::csv) {
        emit_csv(records, os);
    } else {
        emit_json(records, os);
    }
    os.flush();
    if (!os) {
        throw std::runtime_error("write_records: write failed for '" + path + "'");
    }
}

void emit_stieltjes_csv(std::span<const StieltjesSweepRecord> records,
                        std::ostream& os) {
    os << "n,u,v,re_mean_m,im_mean_m,re_s,im_s,abs_lambda,envelope_ratio\n";
    os.precision(17);
    for (const auto& r : records) {
        os << r.n << ',' << r.z.u << ',' << r.z.v << ',' << r.mean_m.real()
           << ',' << r.mean_m.imag() << ',' << r.s.real() << ',' << r.s.imag()
           << ',' << std::abs(r.lambda) << ',' << r.envelope_ratio << '\n';
    }
}

}  // namespace wigner
