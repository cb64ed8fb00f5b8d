// Command-line driver: solve models from files, run the built-in
// reproduction pipelines, and sweep random benchmark models.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "smrm/benchgen.hpp"
#include "smrm/continuous.hpp"
#include "smrm/direct.hpp"
#include "smrm/errors.hpp"
#include "smrm/iterative.hpp"
#include "smrm/model.hpp"
#include "smrm/modelfile.hpp"
#include "smrm/queries.hpp"
#include "smrm/reproduce.hpp"

using namespace smrm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write output file '" + path + "'");
    out.precision(12);
    return out;
}

void write_density_csv(const std::string& path, const std::vector<std::string>& states,
                       const Hypervector& f, double step) {
    auto out = open_out(path);
    out << "state,abscissa,value\n";
    for (std::size_t s = 0; s < f.rows(); ++s)
        for (std::size_t r = 0; r < f.len(); ++r)
            out << states[s] << ',' << step * static_cast<double>(r) << ',' << f.row(s)[r]
                << '\n';
}

void write_report_csv(const std::string& path, const std::string& method,
                      const SolveReport& report) {
    auto out = open_out(path);
    out << "method,iterations,residual,wall_time,termination\n";
    out << method << ',' << report.iterations << ',' << report.residual << ','
        << report.wall_time << ',' << to_string(report.termination) << '\n';
}

void write_history_csv(const std::string& path, const SolveReport& report) {
    auto out = open_out(path);
    out << "iteration,max_diff\n";
    for (std::size_t i = 0; i < report.history.size(); ++i)
        out << (i + 1) << ',' << report.history[i] << '\n';
}

int exit_code_for(const SolveReport& report) {
    switch (report.termination) {
        case Termination::Converged:
        case Termination::Direct: return kExitOk;
        case Termination::MaxIterations:
        case Termination::Diverged: return kExitNotConverged;
    }
    return kExitNotConverged;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SMRM_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

struct SolveArgs {
    std::string model_path;
    std::string method = "power";
    std::size_t k = 0;
    double interval = 0.0;
    std::size_t points = 0;
    std::size_t pad = 0;
    bool pad_set = false;
    double epsilon = 1e-7;
    std::size_t max_iter = 2000;
    double divergence = 1e2;
    std::string quad = "trapezoid";
    std::size_t dvc_terms = 50;
    std::string out = "density.csv";
    std::string report_path = "report.csv";
    std::string history_path;
};

QuadRule parse_rule(const std::string& name, std::size_t* romberg_level) {
    if (name == "riemann-l") return QuadRule::RiemannLeft;
    if (name == "riemann-r") return QuadRule::RiemannRight;
    if (name == "trapezoid") return QuadRule::Trapezoid;
    if (name.rfind("romberg:", 0) == 0) {
        if (!romberg_level) throw ParseError("romberg rule is only valid for cont-power");
        *romberg_level = std::stoul(name.substr(8));
        return QuadRule::Trapezoid;
    }
    throw ParseError("unknown quadrature rule '" + name + "'");
}

int run_solve(const SolveArgs& args) {
    const Smrm model = load_model(args.model_path);
    const auto violations = validate(model);
    if (!violations.empty()) {
        std::cerr << "model validation failed:\n";
        for (const auto& v : violations) std::cerr << "  " << v << '\n';
        return kExitInput;
    }

    IterationConfig cfg;
    cfg.epsilon = args.epsilon;
    cfg.max_iterations = args.max_iter;
    cfg.divergence_threshold = args.divergence;
    cfg.record_history = !args.history_path.empty();

    const bool continuous = args.method == "cont-power" || args.method == "cont-jacobi";
    SolveReport report;
    std::vector<std::string> states;
    double step = 1.0;

    if (continuous) {
        if (args.interval <= 0.0 || args.points < 2)
            throw ParseError("continuous methods need --interval and --points");
        const QuadratureGrid grid(args.interval, args.points);
        const auto sys = preprocess_continuous(model, grid);
        states = sys.s_question;
        step = grid.step();
        std::size_t level = 0;
        const QuadRule rule = parse_rule(args.quad, &level);
        if (args.method == "cont-power") {
            report = level > 0 ? solve_power_romberg(sys, cfg, RombergLevel(level))
                               : solve_power_continuous(sys, cfg, rule);
        } else {
            report = solve_jacobi_continuous(sys, cfg, rule, args.dvc_terms);
        }
        if (!sys.reach_prob_one)
            std::cerr << "note: partial densities (reachability below one)\n";
    } else {
        if (args.k == 0) throw ParseError("discrete methods need --k");
        const auto sys = preprocess(model, args.k);
        states = sys.s_question;
        const std::size_t pad = args.pad_set ? args.pad : args.k - 1;
        if (args.method == "ge") {
            report = solve_ge(sys);
        } else if (args.method == "lu") {
            report = solve_lu_approx(sys, pad);
        } else if (args.method == "power") {
            report = solve_power_exact(sys, cfg);
        } else if (args.method == "power-approx") {
            report = solve_power_approx(sys, cfg, pad);
        } else if (args.method == "jacobi") {
            report = solve_jacobi(sys, cfg);
        } else if (args.method == "gauss-seidel") {
            report = solve_gauss_seidel(sys, cfg);
        } else {
            throw ParseError("unknown method '" + args.method + "'");
        }
        if (!sys.reach_prob_one)
            std::cerr << "note: partial densities (reachability below one)\n";
    }

    write_density_csv(args.out, states, report.solution, step);
    write_report_csv(args.report_path, args.method, report);
    if (!args.history_path.empty()) write_history_csv(args.history_path, report);
    std::cerr << args.method << ": " << to_string(report.termination) << " after "
              << report.iterations << " iterations, residual " << report.residual << ", "
              << report.wall_time << " s\n";
    return exit_code_for(report);
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

int reproduce_toy(const std::string& dir) {
    const auto model = toy_model();
    const std::size_t k = 150;
    const auto sys = preprocess(model, k);

    const auto ge = solve_ge(sys);
    IterationConfig cfg;
    cfg.epsilon = 1e-16;
    cfg.max_iterations = 5000;
    const auto power = solve_power_exact(sys, cfg);
    const auto lu_short = solve_lu_approx(sys, 450);  // total length 600
    const auto lu_long = solve_lu_approx(sys, 2100);  // total length 2250

    write_density_csv(dir + "/toy_pmf_ge.csv", sys.s_question, ge.solution, 1.0);
    write_density_csv(dir + "/toy_pmf_power.csv", sys.s_question, power.solution, 1.0);
    write_density_csv(dir + "/toy_pmf_lu600.csv", sys.s_question, lu_short.solution, 1.0);
    write_density_csv(dir + "/toy_pmf_lu2250.csv", sys.s_question, lu_long.solution, 1.0);

    {
        auto out = open_out(dir + "/toy_error_vs_ge.csv");
        out << "method,state,abscissa,abs_error\n";
        auto dump = [&](const char* name, const Hypervector& f) {
            for (std::size_t s = 0; s < f.rows(); ++s)
                for (std::size_t r = 0; r < f.len(); ++r)
                    out << name << ',' << sys.s_question[s] << ',' << r << ','
                        << std::abs(f.row(s)[r] - ge.solution.row(s)[r]) << '\n';
        };
        dump("power", power.solution);
        dump("lu600", lu_short.solution);
        dump("lu2250", lu_long.solution);
    }

    Rng rng(default_seed());
    const auto traces = sample_traces(model, 0, 10000, static_cast<double>(k), rng);
    const auto empirical = empirical_density(traces, k);
    double sampling_err = 0.0;
    {
        auto out = open_out(dir + "/toy_sampling.csv");
        out << "abscissa,empirical,power,abs_diff\n";
        for (std::size_t r = 0; r < k; ++r) {
            const double diff = std::abs(empirical[r] - power.solution.row(0)[r]);
            sampling_err = std::max(sampling_err, diff);
            out << r << ',' << empirical[r] << ',' << power.solution.row(0)[r] << ',' << diff
                << '\n';
        }
    }

    auto out = open_out(dir + "/toy_report.csv");
    out << "method,iterations,residual,wall_time,termination,max_err_vs_ge\n";
    auto line = [&](const char* name, const SolveReport& r) {
        out << name << ',' << r.iterations << ',' << r.residual << ',' << r.wall_time << ','
            << to_string(r.termination) << ',' << r.solution.max_abs_diff(ge.solution) << '\n';
    };
    line("ge", ge);
    line("power", power);
    line("lu600", lu_short);
    line("lu2250", lu_long);
    std::cerr << "toy: max |empirical - power| = " << sampling_err << "\n";
    return kExitOk;
}

int reproduce_waste(const std::string& dir) {
    const auto model = waste_treatment_model();
    const std::size_t k = 100;
    const auto sys = preprocess(model, k);
    const auto ge = solve_ge(sys);
    IterationConfig cfg;
    cfg.epsilon = 1e-16;
    const auto power = solve_power_exact(sys, cfg);

    const auto working = std::find(sys.s_question.begin(), sys.s_question.end(), "working") -
                         sys.s_question.begin();
    auto out = open_out(dir + "/waste_pmf.csv");
    out << "time,ge,power,cumulative\n";
    double cum = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        cum += ge.solution.row(working)[r];
        out << r << ',' << ge.solution.row(working)[r] << ',' << power.solution.row(working)[r]
            << ',' << cum << '\n';
    }
    auto rep = open_out(dir + "/waste_report.csv");
    rep << "method,iterations,residual,wall_time,termination\n";
    rep << "ge,0," << ge.residual << ',' << ge.wall_time << ",direct\n";
    rep << "power," << power.iterations << ',' << power.residual << ',' << power.wall_time << ','
        << to_string(power.termination) << '\n';
    std::cerr << "waste: cumulative mass over 0..99 = " << cum << ", |ge - power| = "
              << ge.solution.max_abs_diff(power.solution) << "\n";
    return kExitOk;
}

int reproduce_coronary(const std::string& dir) {
    const double bound = 2000.0;
    const std::size_t points = 2001;
    const QuadratureGrid grid(bound, points);

    std::vector<Vec> cdfs;
    std::vector<std::string> units;
    int worst = kExitOk;
    for (const auto& unit : coronary_absorbing_units()) {
        const auto model = coronary_model(unit);
        const auto sys = preprocess_continuous(model, grid);
        IterationConfig cfg;
        cfg.epsilon = 1e-10;
        const auto report = solve_power_continuous(sys, cfg, QuadRule::Trapezoid);
        worst = std::max(worst, exit_code_for(report));
        const auto ccu = std::find(sys.s_question.begin(), sys.s_question.end(), "CCU") -
                         sys.s_question.begin();
        const Vec cdf = cdf_from_density(report.solution.row_vec(ccu), DensityMode::Continuous,
                                         grid.step());
        auto out = open_out(dir + "/coronary_cdf_" + unit + ".csv");
        out << "time,cdf\n";
        for (std::size_t j = 0; j < cdf.size(); ++j) out << grid.point(j) << ',' << cdf[j] << '\n';
        cdfs.push_back(cdf);
        units.push_back(unit);
        std::cerr << "coronary " << unit << ": " << to_string(report.termination) << " after "
                  << report.iterations << " iterations, cdf(" << bound << ") = " << cdf.back()
                  << "\n";
    }

    auto out = open_out(dir + "/coronary_stacked.csv");
    out << "time";
    for (const auto& unit : units) out << ',' << unit;
    out << ",sum\n";
    for (std::size_t j = 0; j < points; ++j) {
        out << grid.point(j);
        double sum = 0.0;
        for (const auto& cdf : cdfs) {
            out << ',' << cdf[j];
            sum += cdf[j];
        }
        out << ',' << sum << '\n';
    }
    double final_sum = 0.0;
    for (const auto& cdf : cdfs) final_sum += cdf.back();
    std::cerr << "coronary: stacked cdf at t = " << bound << " is " << final_sum << "\n";
    return worst;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string mc = "uniform";
    std::string pmf = "geometric";
    double param_lo = 0.3;
    double param_hi = 0.6;
    std::size_t samples = 50;
    std::size_t states = 10;
    std::size_t k = 256;
    std::uint64_t seed = 1;
    double epsilon = 1e-7;
    std::size_t max_iter = 2000;
    std::size_t jobs = 1;
    std::vector<std::string> methods = {"power", "jacobi", "gauss-seidel"};
    std::string out = "bench.csv";
    std::string dump_models;
};

struct BenchRow {
    std::size_t sample;
    std::string method;
    std::size_t iterations = 0;
    double residual = 0.0;
    double wall_time = 0.0;
    std::string termination;
    double max_err_vs_first = 0.0;
};

GeneratedChain generate_chain(const std::string& mc, std::size_t states, Rng& rng) {
    if (mc == "uniform") return gen_mc_uniform(states, rng);
    if (mc == "block") return gen_mc_block(states, rng);
    if (mc == "npass") return gen_mc_npass(states, rng);
    if (mc == "sparse") return gen_mc_sparse(states, rng);
    throw ParseError("unknown chain generator '" + mc + "'");
}

int run_bench(const BenchArgs& args) {
    std::vector<BenchRow> rows;
    std::mutex rows_mutex;
    std::atomic<std::size_t> next_sample{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next_sample.fetch_add(1);
            if (i >= args.samples) return;
            Rng rng = Rng(args.seed).split(i);
            std::vector<BenchRow> local;
            try {
                const auto chain = generate_chain(args.mc, args.states, rng);
                if (!args.dump_models.empty()) {
                    Rng dump_rng = Rng(args.seed).split(i); // mirror the reward draws
                    (void)generate_chain(args.mc, args.states, dump_rng);
                    save_model(args.dump_models + "/sample_" + std::to_string(i) + ".model",
                               smrm_from_chain(chain, args.pmf, args.param_lo, args.param_hi,
                                               dump_rng));
                }
                const auto sys = system_from_chain(chain, args.k, args.pmf, args.param_lo,
                                                   args.param_hi, rng);
                IterationConfig cfg;
                cfg.epsilon = args.epsilon;
                cfg.max_iterations = args.max_iter;
                Hypervector baseline;
                for (const auto& method : args.methods) {
                    BenchRow row;
                    row.sample = i;
                    row.method = method;
                    try {
                        SolveReport rep;
                        if (method == "power") rep = solve_power_exact(sys, cfg);
                        else if (method == "jacobi") rep = solve_jacobi(sys, cfg);
                        else if (method == "gauss-seidel") rep = solve_gauss_seidel(sys, cfg);
                        else if (method == "ge") rep = solve_ge(sys);
                        else if (method == "lu") rep = solve_lu_approx(sys, 10 * args.k);
                        else if (method == "power-approx")
                            rep = solve_power_approx(sys, cfg, args.k - 1);
                        else throw ParseError("unknown method '" + method + "'");
                        row.iterations = rep.iterations;
                        row.residual = rep.residual;
                        row.wall_time = rep.wall_time;
                        row.termination = to_string(rep.termination);
                        if (baseline.rows() == 0) baseline = rep.solution;
                        row.max_err_vs_first = rep.solution.max_abs_diff(baseline);
                    } catch (const std::exception& e) {
                        row.termination = std::string("error: ") + e.what();
                    }
                    local.push_back(std::move(row));
                }
            } catch (const std::exception& e) {
                BenchRow row;
                row.sample = i;
                row.method = "generate";
                row.termination = std::string("error: ") + e.what();
                local.push_back(std::move(row));
            }
            std::lock_guard<std::mutex> lock(rows_mutex);
            for (auto& r : local) rows.push_back(std::move(r));
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, args.jobs);
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j + 1 < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return a.sample != b.sample ? a.sample < b.sample : a.method < b.method;
    });
    auto out = open_out(args.out);
    out << "sample,method,iterations,residual,wall_time,termination,max_err_vs_first\n";
    for (const auto& r : rows)
        out << r.sample << ',' << r.method << ',' << r.iterations << ',' << r.residual << ','
            << r.wall_time << ",\"" << r.termination << "\"," << r.max_err_vs_first << '\n';
    std::cerr << "bench: " << args.samples << " samples x " << args.methods.size()
              << " methods written to " << args.out << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-passage reward density solver for stochastic Markov reward models"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "solve a model file");
    solve->add_option("model", solve_args.model_path, "model file")->required();
    solve->add_option("--method", solve_args.method,
                      "ge|lu|power|power-approx|jacobi|gauss-seidel|cont-power|cont-jacobi");
    solve->add_option("--k", solve_args.k, "lattice truncation length");
    solve->add_option("--interval", solve_args.interval, "continuous interval bound");
    solve->add_option("--points", solve_args.points, "continuous point count");
    auto* pad = solve->add_option("--pad", solve_args.pad, "padding for lu/power-approx");
    solve->add_option("--epsilon", solve_args.epsilon, "convergence tolerance");
    solve->add_option("--max-iter", solve_args.max_iter, "iteration cap");
    solve->add_option("--divergence", solve_args.divergence, "divergence guard");
    solve->add_option("--quad", solve_args.quad, "riemann-l|riemann-r|trapezoid|romberg:L");
    solve->add_option("--dvc-terms", solve_args.dvc_terms, "series terms for cont-jacobi");
    solve->add_option("--out", solve_args.out, "density CSV path");
    solve->add_option("--report", solve_args.report_path, "report CSV path");
    solve->add_option("--history", solve_args.history_path, "per-iteration max-diff CSV");

    std::string repro_case, repro_dir = ".";
    auto* repro = app.add_subcommand("reproduce", "run a built-in study pipeline");
    repro->add_option("case", repro_case, "toy|waste|coronary")->required();
    repro->add_option("--out", repro_dir, "output directory");

    BenchArgs bench_args;
    bench_args.seed = default_seed();
    auto* bench = app.add_subcommand("bench", "random-model benchmark sweep");
    bench->add_option("--mc", bench_args.mc, "uniform|block|npass|sparse");
    bench->add_option("--pmf", bench_args.pmf,
                      "geometric|binomial|discrete-weibull|discrete-gumbel");
    std::string range = "0.3:0.6";
    bench->add_option("--param-range", range, "lo:hi for the family's free parameter");
    bench->add_option("--samples", bench_args.samples, "number of sampled models");
    bench->add_option("--states", bench_args.states, "states per model");
    bench->add_option("--k", bench_args.k, "lattice truncation length");
    bench->add_option("--seed", bench_args.seed, "RNG seed (default from SMRM_SEED)");
    bench->add_option("--epsilon", bench_args.epsilon, "convergence tolerance");
    bench->add_option("--max-iter", bench_args.max_iter, "iteration cap");
    bench->add_option("--jobs", bench_args.jobs, "worker threads");
    bench->add_option("--methods", bench_args.methods, "methods to run");
    bench->add_option("--out", bench_args.out, "per-sample CSV path");
    bench->add_option("--dump-models", bench_args.dump_models,
                      "directory for the generated model files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            solve_args.pad_set = pad->count() > 0;
            return run_solve(solve_args);
        }
        if (*repro) {
            std::filesystem::create_directories(repro_dir);
            if (repro_case == "toy") return reproduce_toy(repro_dir);
            if (repro_case == "waste") return reproduce_waste(repro_dir);
            if (repro_case == "coronary") return reproduce_coronary(repro_dir);
            std::cerr << "unknown case '" << repro_case << "'\n";
            return kExitInput;
        }
        if (*bench) {
            const auto colon = range.find(':');
            if (colon == std::string::npos) throw ParseError("--param-range expects lo:hi");
            bench_args.param_lo = std::stod(range.substr(0, colon));
            bench_args.param_hi = std::stod(range.substr(colon + 1));
            if (!bench_args.dump_models.empty())
                std::filesystem::create_directories(bench_args.dump_models);
            return run_bench(bench_args);
        }
    } catch (const SingularSliceMatrix& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
