// wignerlab: sample Wigner ensembles, verify resolvent identities, sweep
// convergence rates, and evaluate smoothing-inequality bounds.
//
// Exit codes: 0 success, 1 identity-suite hard failure, 2 I/O or config error.

#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wigner/ensemble.hpp"
#include "wigner/harness.hpp"
#include "wigner/region_bounds.hpp"
#include "wigner/resolvent.hpp"
#include "wigner/semicircle.hpp"
#include "wigner/spectral.hpp"

namespace {

using namespace wigner;

constexpr int kExitOk = 0;
constexpr int kExitIdentityFailure = 1;
constexpr int kExitConfigError = 2;

std::vector<std::size_t> parse_n_list(const std::string& csv) {
    std::vector<std::size_t> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoul(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty n-list");
    return out;
}

std::ostream& open_or_stdout(std::optional<std::ofstream>& file,
                             const std::string& path) {
    if (path.empty()) return std::cout;
    file.emplace(path);
    if (!*file) throw std::runtime_error("cannot open '" + path + "'");
    return *file;
}

Spectrum read_spectrum_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    Spectrum s;
    double v;
    while (is >> v) s.lambdas.push_back(v);
    if (s.lambdas.empty()) {
        throw std::runtime_error("no eigenvalues in '" + path + "'");
    }
    std::sort(s.lambdas.begin(), s.lambdas.end());
    s.n = s.lambdas.size();
    return s;
}

struct CommonOpts {
    std::string ensemble = "gaussian";
    std::uint64_t seed = 1;
    double d0 = 2.0;
    double a0 = 1.0;
    bool pipeline = false;
    std::size_t threads = 0;
};

void add_ensemble_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--ensemble", o.ensemble,
                    "entry law: gaussian, rademacher, uniform-scaled")
        ->envname("WIGNERLAB_ENSEMBLE");
    cmd->add_option("--seed", o.seed, "master seed")->envname("WIGNERLAB_SEED");
    cmd->add_option("--d0", o.d0, "truncation constant D0");
    cmd->add_flag("--pipeline", o.pipeline,
                  "apply the truncation/centering/rescaling pipeline");
    cmd->add_option("--threads", o.threads, "thread budget (0 = hardware)")
        ->envname("WIGNERLAB_THREADS");
}

int cmd_sample(std::size_t n, const CommonOpts& o, const std::string& out,
               const std::string& spectrum_out) {
    WignerSpec spec{n, law_from_name(o.ensemble), o.seed, o.d0, o.pipeline};
    SymmetricMatrix x = sample_entries(spec);
    SymmetricMatrix w;
    if (o.pipeline) {
        PipelineOutput p = standardize_pipeline(x, spec.law, o.d0);
        w = assemble(p.standardized);
        std::cerr << "pipeline: threshold=" << p.threshold
                  << " mean_hat=" << p.mean_hat << " sigma=" << p.sigma
                  << " zeroed=" << p.entries_zeroed << '\n';
    } else {
        w = assemble(x);
    }
    {
        std::optional<std::ofstream> file;
        write_matrix(open_or_stdout(file, out), o.pipeline ? w : x);
    }
    if (!spectrum_out.empty()) {
        const Spectrum s = eigenvalues(w);
        std::ofstream os(spectrum_out);
        if (!os) throw std::runtime_error("cannot open '" + spectrum_out + "'");
        os.precision(17);
        for (double lambda : s.lambdas) os << lambda << '\n';
    }
    return kExitOk;
}

int cmd_verify_draws(const std::vector<std::size_t>& n_list, std::size_t seeds,
                     const CommonOpts& o, const std::string& grid_path,
                     const std::string& out) {
    std::vector<UpperHalfPoint> grid;
    if (grid_path.empty()) {
        grid = default_identity_grid();
    } else {
        std::ifstream is(grid_path);
        if (!is) throw std::runtime_error("cannot open '" + grid_path + "'");
        grid = read_grid(is);
    }
    const EntryLaw law = law_from_name(o.ensemble);

    struct Task {
        std::size_t n;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t n : n_list) {
        for (std::size_t s = 0; s < seeds; ++s) {
            tasks.push_back({n, derive_seed(o.seed, n, s)});
        }
    }
    std::vector<IdentityReport> partial(tasks.size());
    parallel_for(tasks.size(), o.threads, [&](std::size_t t) {
        WignerSpec spec{tasks[t].n, law, tasks[t].seed, o.d0, o.pipeline};
        const SymmetricMatrix w = sample_wigner(spec);
        IdentityReport rep = identity_report(w, grid, tasks[t].seed);
        for (const UpperHalfPoint& z : grid) {
            const std::size_t first[] = {0};
            rep.record("lem7.solved_form_full",
                       lambda_solved_form_residual(w, z, {}),
                       {tasks[t].n, tasks[t].seed, 0, z});
            if (tasks[t].n > 1) {
                rep.record("lem7.solved_form_minor",
                           lambda_solved_form_residual(w, z, first),
                           {tasks[t].n, tasks[t].seed, 0, z});
            }
        }
        partial[t] = std::move(rep);
    });
    IdentityReport merged;
    for (const IdentityReport& rep : partial) merged.merge(rep);

    {
        std::optional<std::ofstream> file;
        write_report(open_or_stdout(file, out), merged);
    }
    std::cerr << "identity max residual: " << merged.max_residual()
              << ", hard failures: " << merged.hard_failures() << '\n';
    return merged.hard_failures() == 0 ? kExitOk : kExitIdentityFailure;
}

int cmd_verify_spectrum(const std::string& path) {
    const Spectrum s = read_spectrum_file(path);
    const double delta = kolmogorov_distance(esd_of(s));
    const auto rows = rigidity_profile(s);
    double max_ratio = 0.0;
    std::size_t argmax = 0;
    for (const auto& row : rows) {
        if (row.ratio >= max_ratio) {
            max_ratio = row.ratio;
            argmax = row.j;
        }
    }
    std::cout.precision(17);
    std::cout << "n=" << s.n << '\n'
              << "delta_star=" << delta << '\n'
              << "rigidity.max_ratio=" << max_ratio << '\n'
              << "rigidity.argmax_j=" << argmax << '\n';
    return kExitOk;
}

int cmd_sweep_rate(const std::string& n_csv, const std::string& reps_csv,
                   const CommonOpts& o, const std::string& out,
                   const std::string& format, bool stable_timing) {
    ExperimentConfig cfg;
    cfg.n_list = parse_n_list(n_csv);
    if (!reps_csv.empty() && reps_csv != "auto") {
        cfg.replicates = parse_n_list(reps_csv);
    }
    cfg.law = law_from_name(o.ensemble);
    cfg.apply_pipeline = o.pipeline;
    cfg.d0 = o.d0;
    cfg.a0 = o.a0;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.stable_timing = stable_timing;
    cfg.format = (format == "json") ? OutputFormat::json : OutputFormat::csv;

    const auto records = run_rate_sweep(cfg);
    if (out.empty()) {
        if (cfg.format == OutputFormat::csv) {
            emit_csv(records, std::cout);
        } else {
            emit_json(records, std::cout);
        }
    } else {
        write_records(records, cfg.format, out);
    }
    if (records.size() >= 3) {
        const ExponentFit fit = fit_exponent(records);
        double lo = records[0].n_times_delta, hi = lo;
        for (const auto& r : records) {
            lo = std::min(lo, r.n_times_delta);
            hi = std::max(hi, r.n_times_delta);
        }
        std::cerr << "fit: slope=" << fit.slope << " r2=" << fit.r2
                  << " n*delta band=" << hi / lo << '\n';
    }
    return kExitOk;
}

int cmd_sweep_stieltjes(const std::string& n_csv, const std::string& reps_csv,
                        const CommonOpts& o, std::size_t u_count,
                        std::size_t v_count, const std::string& out) {
    ExperimentConfig cfg;
    cfg.n_list = parse_n_list(n_csv);
    if (!reps_csv.empty() && reps_csv != "auto") {
        cfg.replicates = parse_n_list(reps_csv);
    }
    cfg.law = law_from_name(o.ensemble);
    cfg.apply_pipeline = o.pipeline;
    cfg.d0 = o.d0;
    cfg.a0 = o.a0;
    cfg.seed = o.seed;
    cfg.threads = o.threads;

    const auto records = run_stieltjes_sweep(cfg, u_count, v_count);
    {
        std::optional<std::ofstream> file;
        emit_stieltjes_csv(records, open_or_stdout(file, out));
    }
    for (std::size_t n : cfg.n_list) {
        std::cerr << "n=" << n
                  << " max envelope ratio=" << max_envelope_ratio(records, n)
                  << '\n';
    }
    return kExitOk;
}

int cmd_bound(std::size_t n, const CommonOpts& o, double c1, double c2,
              double v_top, double shift, const std::string& spectrum_path,
              const std::string& out, const std::string& profile_csv,
              bool calibrate) {
    const SmoothingParams params = semicircle::smoothing_params(n, o.a0);

    TransformSampler s_f;
    double delta_direct = -1.0;
    if (!spectrum_path.empty()) {
        auto spectrum = std::make_shared<Spectrum>(read_spectrum_file(spectrum_path));
        s_f = [spectrum](const UpperHalfPoint& z) {
            return stieltjes_of_spectrum(*spectrum, z).m_n;
        };
        delta_direct = kolmogorov_distance(esd_of(*spectrum));
    } else {
        s_f = [shift](const UpperHalfPoint& z) {
            return semicircle::stieltjes({z.u - shift, z.v});
        };
        // Delta(G(.-shift), G) on a dense grid.
        double best = 0.0;
        for (int i = 0; i <= 200000; ++i) {
            const double x = -2.2 + 4.4 * i / 200000.0;
            best = std::max(best, std::abs(semicircle::cdf(x - shift) -
                                           semicircle::cdf(x)));
        }
        delta_direct = best;
    }

    BoundBreakdown bd = smoothing_bound(s_f, params, c1, c2, v_top);
    if (calibrate) {
        const auto [k1, k2] = calibrate_constants({{delta_direct, bd}});
        bd = smoothing_bound(s_f, params, k1, k2, v_top);
    }

    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, out);
    os.precision(17);
    os << "n=" << n << '\n'
       << "a0=" << o.a0 << '\n'
       << "v0=" << params.v0 << '\n'
       << "epsilon=" << params.epsilon << '\n'
       << "c1=" << bd.c1 << '\n'
       << "c2=" << bd.c2 << '\n'
       << "integral_top=" << bd.integral_top << '\n'
       << "integral_vertical=" << bd.integral_vertical << '\n'
       << "sup_x=" << bd.sup_x << '\n'
       << "term_c1v0=" << bd.term_c1v0 << '\n'
       << "term_c2eps=" << bd.term_c2eps << '\n'
       << "total=" << bd.total << '\n'
       << "delta_direct=" << delta_direct << '\n'
       << "bound_covers_delta=" << (bd.total >= delta_direct ? 1 : 0) << '\n';

    if (!profile_csv.empty()) {
        std::ofstream ps(profile_csv);
        if (!ps) throw std::runtime_error("cannot open '" + profile_csv + "'");
        ps.precision(17);
        ps << "x,vertical_integral\n";
        for (const auto& [x, val] : bd.profile) ps << x << ',' << val << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wigner spectral-statistics laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file "
                                   "(keys like sweep-rate.seed=1)");

    CommonOpts common;

    // sample
    auto* sample = app.add_subcommand("sample", "draw one matrix and dump it");
    std::size_t sample_n = 64;
    std::string sample_out, sample_spectrum_out;
    sample->add_option("--n", sample_n, "dimension")->required();
    add_ensemble_opts(sample, common);
    sample->add_option("--out", sample_out, "matrix output path (default stdout)");
    sample->add_option("--spectrum-out", sample_spectrum_out,
                       "also write eigenvalues, one per line");

    // verify
    auto* verify = app.add_subcommand(
        "verify", "identity suite and inequality battery on random draws");
    std::string verify_nlist = "4,8,16,32";
    std::size_t verify_seeds = 20;
    std::string verify_grid, verify_out, verify_spectrum;
    verify->add_option("--n-list", verify_nlist, "comma-separated dimensions");
    verify->add_option("--seeds", verify_seeds, "draws per dimension");
    verify->add_option("--grid", verify_grid, "z-grid manifest file");
    verify->add_option("--out", verify_out, "report path (default stdout)");
    verify->add_option("--spectrum", verify_spectrum,
                       "score a dumped spectrum instead of running the suite");
    add_ensemble_opts(verify, common);

    // sweep-rate
    auto* rate = app.add_subcommand("sweep-rate",
                                    "Kolmogorov-distance rate sweep over n");
    std::string rate_nlist = "128,256,512,1024";
    std::string rate_reps = "auto";
    std::string rate_out, rate_format = "csv";
    bool stable_timing = false;
    rate->add_option("--n-list", rate_nlist, "comma-separated dimensions")
        ->envname("WIGNERLAB_N_LIST");
    rate->add_option("--replicates", rate_reps,
                     "comma-separated counts or 'auto' (max(32, 2^18/n))");
    rate->add_option("--out", rate_out, "output path (default stdout)")
        ->envname("WIGNERLAB_OUT");
    rate->add_option("--format", rate_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->envname("WIGNERLAB_FORMAT");
    rate->add_flag("--stable-timing", stable_timing,
                   "record wall_seconds as 0 for byte-identical reruns");
    rate->add_option("--a0", common.a0, "grid constant A0")
        ->envname("WIGNERLAB_A0");
    add_ensemble_opts(rate, common);

    // sweep-stieltjes
    auto* stj = app.add_subcommand("sweep-stieltjes",
                                   "mean Stieltjes transform over the window grid");
    std::string stj_nlist = "256,1024";
    std::string stj_reps = "auto";
    std::string stj_out;
    std::size_t u_count = 9, v_count = 7;
    stj->add_option("--n-list", stj_nlist, "comma-separated dimensions");
    stj->add_option("--replicates", stj_reps, "counts or 'auto'");
    stj->add_option("--u-count", u_count, "grid points along u");
    stj->add_option("--v-count", v_count, "grid points along v");
    stj->add_option("--out", stj_out, "CSV output path (default stdout)");
    stj->add_option("--a0", common.a0, "grid constant A0");
    add_ensemble_opts(stj, common);

    // bound
    auto* bound = app.add_subcommand(
        "bound", "smoothing-inequality bound for a transform sampler");
    std::size_t bound_n = 1000;
    double c1 = 1.0, c2 = 1.0, v_top = 4.0, shift = 0.05;
    std::string bound_spectrum, bound_out, bound_profile;
    bool calibrate = false;
    bound->add_option("--n", bound_n, "dimension fixing v0 = A0/n");
    bound->add_option("--c1", c1, "constant C1")->envname("WIGNERLAB_C1");
    bound->add_option("--c2", c2, "constant C2")->envname("WIGNERLAB_C2");
    bound->add_option("--V", v_top, "top height V");
    bound->add_option("--shift", shift,
                      "compare against the semicircle shifted by this amount");
    bound->add_option("--spectrum", bound_spectrum,
                      "use a dumped spectrum's ESD as F instead of the shift");
    bound->add_option("--out", bound_out, "report path (default stdout)");
    bound->add_option("--profile-csv", bound_profile,
                      "write (x, vertical integral) rows");
    bound->add_flag("--calibrate", calibrate,
                    "rescale C1=C2 to the smallest value covering delta");
    bound->add_option("--a0", common.a0, "grid constant A0");

    for (CLI::App* sub : {sample, verify, rate, stj, bound}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (sample->parsed()) {
            return cmd_sample(sample_n, common, sample_out, sample_spectrum_out);
        }
        if (verify->parsed()) {
            if (!verify_spectrum.empty()) return cmd_verify_spectrum(verify_spectrum);
            return cmd_verify_draws(parse_n_list(verify_nlist), verify_seeds,
                                    common, verify_grid, verify_out);
        }
        if (rate->parsed()) {
            return cmd_sweep_rate(rate_nlist, rate_reps, common, rate_out,
                                  rate_format, stable_timing);
        }
        if (stj->parsed()) {
            return cmd_sweep_stieltjes(stj_nlist, stj_reps, common, u_count,
                                       v_count, stj_out);
        }
        if (bound->parsed()) {
            return cmd_bound(bound_n, common, c1, c2, v_top, shift,
                             bound_spectrum, bound_out, bound_profile, calibrate);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}
