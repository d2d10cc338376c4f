#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "wigner/harness.hpp"

using namespace wigner;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.n_list = {16, 32};
    cfg.replicates = {8};
    cfg.seed = 2024;
    cfg.threads = 1;
    cfg.stable_timing = true;
    return cfg;
}

const MatrixSource kZeroSource = [](std::size_t n, std::uint64_t) {
    return SymmetricMatrix(n);
};

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("replicate rule") {
    CHECK(default_replicates(128) == 2048);
    CHECK(default_replicates(256) == 1024);
    CHECK(default_replicates(1024) == 256);
    CHECK(default_replicates(1 << 20) == 32);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_config();
    validate(cfg);
    cfg.n_list = {32, 16};
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.n_list.clear();
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.replicates = {4, 5, 6};
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.replicates = {0};
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);

    CHECK_THROWS_AS(parallel_for(16, 4,
                                 [](std::size_t i) {
                                     if (i == 7) {
                                         throw std::runtime_error("boom");
                                     }
                                 }),
                    std::runtime_error);
}

TEST_CASE("zero-matrix stub pins the distance at one half") {
    ExperimentConfig cfg = small_config();
    const auto records = run_rate_sweep(cfg, kZeroSource);
    REQUIRE(records.size() == 2);
    for (const auto& rec : records) {
        CHECK(rec.delta_n == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(rec.delta_star_mean == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(rec.bootstrap_se == doctest::Approx(0.0));
        CHECK(rec.n_times_delta ==
              doctest::Approx(0.5 * double(rec.n)).epsilon(1e-15));
        CHECK(rec.wall_seconds == 0.0);
    }
}

TEST_CASE("sweep records are reproducible and respect the Jensen ordering") {
    ExperimentConfig cfg = small_config();
    const auto a = run_rate_sweep(cfg);
    const auto b = run_rate_sweep(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].delta_n == b[i].delta_n);
        CHECK(a[i].delta_star_mean == b[i].delta_star_mean);
        CHECK(a[i].bootstrap_se == b[i].bootstrap_se);
        CHECK(a[i].delta_star_mean + 1e-12 >= a[i].delta_n);
        CHECK(a[i].seed == cfg.seed);
        CHECK(a[i].delta_n >= 0.0);
        CHECK(a[i].delta_n <= 1.0);
    }
}

TEST_CASE("thread budget does not change the output") {
    ExperimentConfig cfg = small_config();
    cfg.threads = 1;
    const auto serial = run_rate_sweep(cfg);
    cfg.threads = 4;
    const auto parallel = run_rate_sweep(cfg);
    std::ostringstream ss_serial, ss_parallel;
    emit_csv(serial, ss_serial);
    emit_csv(parallel, ss_parallel);
    CHECK(ss_serial.str() == ss_parallel.str());
}

TEST_CASE("exponent fit on exact log-log data") {
    std::vector<RateSweepRecord> recs(3);
    recs[0].n = 100;
    recs[0].delta_n = 1e-2;
    recs[1].n = 200;
    recs[1].delta_n = 5e-3;
    recs[2].n = 400;
    recs[2].delta_n = 2.5e-3;
    const ExponentFit fit = fit_exponent(recs);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

    for (auto& r : recs) r.delta_n = 0.25;
    const ExponentFit flat = fit_exponent(recs);
    CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-12));

    recs.resize(2);
    CHECK_THROWS_AS(fit_exponent(recs), std::invalid_argument);
    recs.resize(3);
    recs[2].delta_n = 0.0;  // dropped, leaving only two usable points
    CHECK_THROWS_AS(fit_exponent(recs), std::invalid_argument);
}

TEST_CASE("CSV schema and lossless round trip") {
    std::vector<RateSweepRecord> recs(2);
    recs[0] = {128, 2048, 3.25e-3, 7.5e-3, 1.25e-4, 0.416, 12.5, 42};
    recs[1] = {256, 1024, 1.0 / 3.0, 0.5, 1e-7, 85.33333333333333, 0.125,
               0xFFFFFFFFFFFFFFFFULL};
    std::stringstream ss;
    emit_csv(recs, ss);
    const std::string text = ss.str();
    CHECK(text.rfind("n,replicates,delta_n,delta_star_mean,bootstrap_se,"
                     "n_times_delta,wall_seconds,seed\n",
                     0) == 0);
    const auto back = parse_csv(ss);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].n == recs[i].n);
        CHECK(back[i].replicates == recs[i].replicates);
        CHECK(back[i].delta_n == recs[i].delta_n);
        CHECK(back[i].delta_star_mean == recs[i].delta_star_mean);
        CHECK(back[i].bootstrap_se == recs[i].bootstrap_se);
        CHECK(back[i].n_times_delta == recs[i].n_times_delta);
        CHECK(back[i].wall_seconds == recs[i].wall_seconds);
        CHECK(back[i].seed == recs[i].seed);
    }

    // Header-only output for empty input.
    std::stringstream empty;
    emit_csv({}, empty);
    CHECK(empty.str() ==
          "n,replicates,delta_n,delta_star_mean,bootstrap_se,n_times_delta,"
          "wall_seconds,seed\n");
    CHECK(parse_csv(empty).empty());

    std::stringstream bad("wrong,header\n");
    CHECK_THROWS_AS(parse_csv(bad), std::runtime_error);
}

TEST_CASE("JSON mirror round trip") {
    std::vector<RateSweepRecord> recs(1);
    recs[0] = {64, 32, 1.5e-2, 2.5e-2, 3e-4, 0.96, 0.0, 7};
    std::stringstream ss;
    emit_json(recs, ss);
    const auto back = parse_json(ss);
    REQUIRE(back.size() == 1);
    CHECK(back[0].n == 64);
    CHECK(back[0].delta_n == recs[0].delta_n);
    CHECK(back[0].seed == 7);
}

TEST_CASE("write_records flags unwritable paths") {
    std::vector<RateSweepRecord> recs(1);
    try {
        write_records(recs, OutputFormat::csv, "/nonexistent-dir/out.csv");
        FAIL("expected I/O error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") !=
              std::string::npos);
    }
}

TEST_CASE("stieltjes sweep on the zero-matrix stub") {
    ExperimentConfig cfg;
    cfg.n_list = {64};
    cfg.replicates = {1};
    cfg.seed = 5;
    cfg.threads = 1;
    const auto records = run_stieltjes_sweep(cfg, kZeroSource, 5, 4);
    REQUIRE(records.size() == 20);
    for (const auto& rec : records) {
        const Cd expected = -1.0 / to_complex(rec.z);
        CHECK(std::abs(rec.mean_m - expected) <= 1e-14 * (1.0 + std::abs(expected)));
        CHECK(rec.envelope_ratio >= 0.0);
        CHECK(std::isfinite(rec.envelope_ratio));
    }
    CHECK(max_envelope_ratio(records, 64) > 0.0);
    CHECK_THROWS_AS(max_envelope_ratio(records, 128), std::invalid_argument);
}

TEST_CASE("stieltjes sweep is thread-budget invariant") {
    ExperimentConfig cfg;
    cfg.n_list = {32};
    cfg.replicates = {6};
    cfg.seed = 11;
    cfg.threads = 1;
    const auto serial = run_stieltjes_sweep(cfg, 5, 4);
    cfg.threads = 4;
    const auto parallel = run_stieltjes_sweep(cfg, 5, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].mean_m == parallel[i].mean_m);
        CHECK(serial[i].envelope_ratio == parallel[i].envelope_ratio);
    }
}

TEST_SUITE_END();
