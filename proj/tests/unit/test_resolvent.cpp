#include <doctest.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include "wigner/resolvent.hpp"

using namespace wigner;

namespace {

SymmetricMatrix random_wigner(std::size_t n, std::uint64_t seed) {
    return sample_wigner(WignerSpec{n, EntryLaw::gaussian(), seed, 2.0, false});
}

SymmetricMatrix identity_matrix(std::size_t n) {
    SymmetricMatrix m(n);
    for (std::size_t j = 0; j < n; ++j) m.set(j, j, 1.0);
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("resolvent");

TEST_CASE("closed forms: zero and identity matrices") {
    const UpperHalfPoint zi{0.0, 1.0};
    const auto diag_zero = resolvent_diag(SymmetricMatrix(4), zi);
    for (const Cd& r : diag_zero) {
        CHECK(std::abs(r - Cd{0.0, 1.0}) <= 1e-15);
    }
    const auto diag_one = resolvent_diag(identity_matrix(3), {1.0, 1.0});
    for (const Cd& r : diag_one) {
        CHECK(std::abs(r - Cd{0.0, 1.0}) <= 1e-15);
    }
}

TEST_CASE("dual-path check: dense solve vs eigen-decomposition") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const SymmetricMatrix w = random_wigner(8, seed);
        const EigenDecomposition ed = eigen_decomposition(w);
        for (const UpperHalfPoint z :
             {UpperHalfPoint{0.0, 1.0}, UpperHalfPoint{0.5, 0.1}}) {
            const Cd zc = to_complex(z);
            const auto diag = resolvent_diag(w, z);
            for (std::size_t j = 0; j < 8; ++j) {
                Cd eigen_path{};
                for (std::size_t q = 0; q < 8; ++q) {
                    const double u = ed.vector_entry(j, q);
                    eigen_path += u * u / (ed.spectrum.lambdas[q] - zc);
                }
                CHECK(std::abs(diag[j] - eigen_path) /
                          (1.0 + std::abs(eigen_path)) <=
                      1e-10);
                CHECK(std::abs(diag[j]) <= 1.0 / z.v + 1e-12);
                CHECK(diag[j].imag() > 0.0);
            }
        }
    }
}

TEST_CASE("stieltjes of a spectrum") {
    Spectrum single{1, {0.0}};
    const StieltjesSample at_i = stieltjes_of_spectrum(single, {0.0, 1.0});
    CHECK(std::abs(at_i.m_n - Cd{0.0, 1.0}) <= 1e-15);

    const SymmetricMatrix w = random_wigner(16, 3);
    const Spectrum s = eigenvalues(w);
    for (const UpperHalfPoint z :
         {UpperHalfPoint{0.3, 0.5}, UpperHalfPoint{-1.2, 0.05}}) {
        const StieltjesSample sample = stieltjes_of_spectrum(s, z);
        CHECK(sample.m_n.imag() > 0.0);
        CHECK(std::abs(sample.m_n) <= 1.0 / z.v + 1e-12);
        CHECK(std::abs(sample.lambda_n - (sample.m_n - sample.s)) == 0.0);
        // Derivative against a central finite difference.
        const double h = 1e-6;
        const Cd fd = (stieltjes_of_spectrum(s, {z.u + h, z.v}).m_n -
                       stieltjes_of_spectrum(s, {z.u - h, z.v}).m_n) /
                      (2.0 * h);
        CHECK(std::abs(sample.m_n_prime - fd) <= 1e-6);
    }
}

TEST_CASE("epsilon decomposition on the zero matrix") {
    const std::size_t n = 8;
    const UpperHalfPoint z{0.0, 1.0};
    const Cd zc = to_complex(z);
    const EpsilonDecomposition d =
        epsilon_decomposition(SymmetricMatrix(n), z, 2);
    CHECK(std::abs(d.eps1) == 0.0);
    CHECK(std::abs(d.eps2) == 0.0);
    CHECK(std::abs(d.eps3 - (double(n) - 1.0) / (double(n) * zc)) <= 1e-15);
    CHECK(std::abs(d.eps4 - 1.0 / (double(n) * zc)) <= 1e-15);
    CHECK(d.sign_convention == EpsilonSign::derivation_corrected);
    // R^(j) = (-z)^(-1) I so eta1 = (n-1)/(n z^2).
    CHECK(std::abs(d.eta1 - (double(n) - 1.0) / (double(n) * zc * zc)) <= 1e-15);
    CHECK(std::abs(d.minor_trace - (double(n) - 1.0) * (-1.0 / zc)) <= 1e-14);
}

TEST_CASE("Schur-complement identity from the dense oracle") {
    for (const std::size_t n : {std::size_t{4}, std::size_t{8}, std::size_t{16}}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const SymmetricMatrix w = random_wigner(n, seed);
            const UpperHalfPoint z{0.5, 0.3};
            const Cd zc = to_complex(z);
            const ComplexMatrix r = resolvent(w, z);
            const Cd m = r.trace() / double(n);
            for (std::size_t j = 0; j < n; ++j) {
                const EpsilonDecomposition d = epsilon_decomposition(w, z, j);
                const Cd lhs =
                    d.r_jj * (-zc + d.eps1 - (d.eps2 + d.eps3 + m + d.eps4));
                CHECK(std::abs(lhs - 1.0) <= 1e-10);
                // |eps4| <= 1/(nv) almost surely.
                CHECK(std::abs(d.eps4) <= 1.0 / (double(n) * z.v) + 1e-12);
            }
        }
    }
}

TEST_CASE("identity report on the zero matrix reaches machine precision") {
    const auto grid = default_identity_grid();
    const IdentityReport rep = identity_report(SymmetricMatrix(8), grid, 0);
    for (const char* name :
         {"repr001", "quadratic_selfconsistency", "lambda_repr", "trace_diff",
          "eps4_eta", "deriv_sum"}) {
        REQUIRE(rep.entries.count(name) == 1);
        CHECK(rep.entries.at(name).max_residual <= 1e-14);
    }
    CHECK(rep.hard_failures() == 0);
}

TEST_CASE("identity report on random draws") {
    const auto grid = default_identity_grid();
    IdentityReport merged;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        merged.merge(identity_report(random_wigner(8, seed), grid, seed));
        merged.merge(identity_report(random_wigner(16, seed ^ 0xA5), grid, seed));
    }
    CHECK(merged.max_residual() <= 1e-9);
    CHECK(merged.hard_failures() == 0);
    // The battery entries exist and carry locations.
    REQUIRE(merged.entries.count("resol00.res1_equality") == 1);
    REQUIRE(merged.entries.count("resol00.res2") == 1);
    REQUIRE(merged.entries.count("resol00.res3") == 1);
    REQUIRE(merged.entries.count("resol00.res5") == 1);
    REQUIRE(merged.entries.count("schlein.s2") == 1);
    REQUIRE(merged.entries.count("schlein.s16") == 1);
    REQUIRE(merged.entries.count("lem2.eps4_bound") == 1);
    CHECK(merged.entries.at("resol00.res1_equality").max_residual <= 1e-12);
}

TEST_CASE("identity report stays tight on pipeline-standardized draws") {
    const auto grid = default_identity_grid();
    WignerSpec spec{16, EntryLaw::uniform_scaled(), 21, 1.0, true};
    const SymmetricMatrix w = sample_wigner(spec);
    const IdentityReport rep = identity_report(w, grid, spec.seed);
    CHECK(rep.max_residual() <= 1e-9);
    CHECK(rep.hard_failures() == 0);
}

TEST_CASE("lambda solved form matches the nearest quadratic root") {
    for (const std::size_t n : {std::size_t{8}, std::size_t{16}}) {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const SymmetricMatrix w = random_wigner(n, seed);
            for (const UpperHalfPoint z :
                 {UpperHalfPoint{0.0, 1.0}, UpperHalfPoint{0.5, 0.1}}) {
                CHECK(lambda_solved_form_residual(w, z, {}) <= 1e-9);
                const std::size_t one[] = {0};
                CHECK(lambda_solved_form_residual(w, z, one) <= 1e-9);
                const std::size_t two[] = {0, 3};
                CHECK(lambda_solved_form_residual(w, z, two) <= 1e-9);
            }
        }
    }
}

TEST_CASE("report serialization and grid manifest") {
    const auto grid = default_identity_grid();
    CHECK(grid.size() == 6);

    std::stringstream ss;
    write_grid(ss, grid);
    const auto back = read_grid(ss);
    REQUIRE(back.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(back[i].u == grid[i].u);
        CHECK(back[i].v == grid[i].v);
    }

    // The repo manifest pins the same grid.
    std::ifstream manifest(std::string(WIGNERLAB_SOURCE_DIR) +
                           "/data/identity_grid.txt");
    REQUIRE(manifest.good());
    const auto pinned = read_grid(manifest);
    REQUIRE(pinned.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(pinned[i].u == grid[i].u);
        CHECK(pinned[i].v == grid[i].v);
    }

    const IdentityReport rep =
        identity_report(random_wigner(4, 1), grid, 1);
    std::stringstream out;
    write_report(out, rep);
    const std::string text = out.str();
    CHECK(text.find("repr001.max_residual=") != std::string::npos);
    CHECK(text.find("hard_failures=0") != std::string::npos);

    std::stringstream empty("# nothing\n");
    CHECK_THROWS_AS(read_grid(empty), std::runtime_error);
}

TEST_CASE("input validation") {
    const SymmetricMatrix w = random_wigner(4, 2);
    CHECK_THROWS_AS(resolvent(w, {0.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_decomposition(w, {0.0, 1.0}, 9),
                    std::invalid_argument);
    Spectrum s{2, {0.0, 1.0}};
    CHECK_THROWS_AS(stieltjes_of_spectrum(s, {0.0, 0.0}), std::invalid_argument);
}

TEST_SUITE_END();
