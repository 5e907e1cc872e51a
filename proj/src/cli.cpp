#include "uvsb/cli.hpp"

#include "uvsb/analysis.hpp"
#include "uvsb/config.hpp"
#include "uvsb/csv.hpp"
#include "uvsb/montecarlo.hpp"
#include "uvsb/solver_p0p1.hpp"
#include "uvsb/solver_pdelta.hpp"
#include "uvsb/stencils.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

namespace uvsb::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string subcommand;
    std::string config;
    std::string out = ".";
    std::string seed;
    int threads = 0;
    std::vector<std::string> overrides;
    bool paper_exact = false;
};

struct Context {
    Options opts;
    ConfigTable table;
    Settings settings;
    fs::path out;
    std::vector<std::pair<std::string, std::string>> run_info;

    void note(const std::string& key, const std::string& value) { run_info.emplace_back("run." + key, value); }
    void note(const std::string& key, double value) { note(key, format_double(value)); }
};

void report_error(const std::string& kind, const std::string& message, int code, const std::string& subcommand)
{
    nlohmann::json rec;
    rec["status"] = "error";
    rec["kind"] = kind;
    rec["message"] = message;
    rec["exit_code"] = code;
    if (!subcommand.empty()) rec["subcommand"] = subcommand;
    std::cerr << rec.dump() << '\n';
}

PayoffSpec effective_payoff(const Settings& s)
{
    if (s.regularize_eps > 0.0) return regularize(s.payoff, s.model, s.grid, s.solver, s.regularize_eps);
    return s.payoff;
}

void write_control_csv(const fs::path& path, const Grid2D& g, const Field& q, const std::vector<CandidateTag>* tags)
{
    std::vector<std::string> header{"x", "z", "q"};
    if (tags) header.emplace_back("tag");
    CsvWriter w(path, header);
    for (int j = 0; j < g.nz(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            w.cell(g.x[i]).cell(g.z[j]).cell(q(i, j));
            if (tags) w.cell(std::string(1, to_char((*tags)[g.index(i, j)])));
            w.end_row();
        }
    }
    w.close();
}

void cmd_solve_p0(Context& c, bool with_p1)
{
    const Settings& s = c.settings;
    const auto sol = solve_p0p1(effective_payoff(s), s.model, s.grid, s.solver);
    write_surface_csv(c.out / "p0.csv", sol.p0);
    write_control_csv(c.out / "q0.csv", *sol.grid, sol.q_star0, nullptr);
    if (with_p1) write_surface_csv(c.out / "p1.csv", sol.p1);
    c.note("p0_at_x0_z0", sol.p0.sample(s.model.x0, s.model.z0));
    if (with_p1) c.note("p1_at_x0_z0", sol.p1.sample(s.model.x0, s.model.z0));
}

void cmd_solve_pdelta(Context& c)
{
    const Settings& s = c.settings;
    const auto sol = solve_pdelta(effective_payoff(s), s.model, s.grid, s.solver);
    write_surface_csv(c.out / "pdelta.csv", sol.p_delta);
    write_control_csv(c.out / "control_pdelta.csv", *sol.grid, sol.q_star_delta, &sol.tags);
    c.note("pdelta_at_x0_z0", sol.p_delta.sample(s.model.x0, s.model.z0));
    c.note("candidate_c_fraction", sol.candidate_c_fraction);
    c.note("clamped_nodes", std::to_string(sol.clamped_nodes));
    c.note("linear_method", sol.linear.method);
    c.note("linear_solves", std::to_string(sol.linear.solves));
    c.note("linear_max_residual", sol.linear.max_residual);
}

void cmd_sweep(Context& c)
{
    const Settings& s = c.settings;
    SweepOptions opts = s.sweep;
    opts.keep_surfaces = true;
    const auto report = error_sweep(effective_payoff(s), s.model, s.sweep_deltas, s.grid, s.solver, opts);

    CsvWriter w(c.out / "sweep.csv", {"delta", "error", "x_sup", "z_sup", "error_full", "x_sup_full", "z_sup_full",
                                       "candidate_c_fraction", "in_fit", "fit_slope", "fit_intercept", "fit_r2"});
    for (const auto& r : report.records) {
        w.cell(r.delta).cell(r.error).cell(r.x_sup).cell(r.z_sup).cell(r.error_full).cell(r.x_sup_full);
        w.cell(r.z_sup_full).cell(r.candidate_c_fraction).cell(r.in_fit ? 1 : 0);
        w.cell(report.fit.slope).cell(report.fit.intercept).cell(report.fit.r2);
        w.end_row();
    }
    w.close();

    // Profiles along z = z0 for plotting P^delta against P0 + sqrt(delta) P1.
    const auto& base = *report.base;
    const Grid2D& g = *base.grid;
    std::vector<std::string> header{"x", "p0", "p1"};
    for (const auto& r : report.records) header.push_back("pdelta_" + format_double(r.delta));
    CsvWriter prof(c.out / "sweep_profiles.csv", header);
    for (int i = 0; i < g.nx(); ++i) {
        prof.cell(g.x[i]).cell(base.p0.sample(g.x[i], s.model.z0)).cell(base.p1.sample(g.x[i], s.model.z0));
        for (const auto& pd : report.p_delta) prof.cell(pd.sample(g.x[i], s.model.z0));
        prof.end_row();
    }
    prof.close();
    c.note("fit_slope", report.fit.slope);
    c.note("fit_r2", report.fit.r2);
    c.note("fit_points", std::to_string(report.n_fit));
}

void cmd_bounds(Context& c)
{
    const Settings& s = c.settings;
    const auto paths = simulate_cir(s.model, s.mc.bounds_steps, s.mc.bounds_paths, s.mc.seed);
    CsvWriter w(c.out / "bounds.csv", {"time", "path_id", "z", "lower", "upper"});
    for (int m = 0; m < paths.z.n_paths; ++m) {
        for (int k = 0; k <= paths.z.n_steps; ++k) {
            const double z = paths.z(m, k);
            w.cell(paths.time[k]).cell(m).cell(z).cell(s.model.d * std::sqrt(z)).cell(s.model.u * std::sqrt(z));
            w.end_row();
        }
    }
    w.close();
}

void cmd_coupling(Context& c)
{
    const Settings& s = c.settings;
    CsvWriter w(c.out / "coupling_rate.csv",
                {"control", "delta", "estimate", "stderr", "slope", "slope_stderr", "intercept"});
    for (const auto& name : s.mc.controls) {
        const auto study = coupling_rate_study(s.model, s.mc.rate_deltas, make_control(name, s), s.mc.rate);
        for (const auto& r : study.rows) {
            w.cell(name).cell(r.delta).cell(r.estimate).cell(r.stderr_).cell(study.slope).cell(study.slope_stderr);
            w.cell(study.intercept);
            w.end_row();
        }
        c.note("slope_" + name, study.slope);
    }
    w.close();
}

void cmd_compare(Context& c)
{
    const Settings& s = c.settings;
    const auto sol = solve_p0p1(s.payoff, s.model, s.grid, s.solver);
    const auto rows = compare_bs(sol.p0, s.payoff, s.model, s.compare_x_min, s.compare_x_max, s.compare_tol);
    CsvWriter w(c.out / "compare_bs.csv", {"x", "p0", "bs_low", "bs_high", "dominates"});
    long violations = 0;
    for (const auto& r : rows) {
        w.cell(r.x).cell(r.p0).cell(r.bs_low).cell(r.bs_high).cell(r.dominates ? 1 : 0);
        w.end_row();
        violations += r.dominates ? 0 : 1;
    }
    w.close();
    c.note("dominance_violations", std::to_string(violations));
}

void cmd_gamma(Context& c)
{
    const Settings& s = c.settings;
    const PayoffSpec payoff = effective_payoff(s);
    const auto base = solve_p0p1(payoff, s.model, s.grid, s.solver);
    CsvWriter slices(c.out / "gamma_diag.csv", {"delta", "z", "crossings", "mismatch_nodes", "mismatch_width",
                                                    "peak_lxx_p0", "min_lxx_pdelta", "oscillation_ratio"});
    CsvWriter cross(c.out / "gamma_crossings.csv", {"delta", "z", "x"});
    for (double delta : s.gamma_deltas) {
        ModelParams p = s.model;
        p.delta = delta;
        const auto pd = solve_pdelta(payoff, p, s.grid, s.solver);
        const auto diag = gamma_diagnostics(base.p0, pd.p_delta, s.solver.gamma_eps);
        for (const auto& sl : diag.slices) {
            slices.cell(delta).cell(sl.z).cell(static_cast<long>(sl.crossings.size())).cell(sl.mismatch_nodes);
            slices.cell(sl.mismatch_width).cell(sl.peak_lxx_p0).cell(sl.min_lxx_pdelta).cell(sl.oscillation_ratio);
            slices.end_row();
            for (double x : sl.crossings) {
                cross.cell(delta).cell(sl.z).cell(x);
                cross.end_row();
            }
        }
        c.note("total_mismatch_" + format_double(delta), std::to_string(diag.total_mismatch));
    }
    slices.close();
    cross.close();
}

int execute(const Options& o)
{
    Context c;
    c.opts = o;
    try {
        c.table = ConfigTable::defaults();
        if (!o.config.empty()) {
            if (!fs::exists(o.config)) throw ConfigError("config file not found: " + o.config);
            c.table.load_file(o.config);
        }
        for (const auto& kv : o.overrides) c.table.set_override(kv);
        if (!o.seed.empty()) c.table.set("mc.seed", o.seed);
        if (o.paper_exact) c.table.set("solver.mode", "paper-exact");
        c.settings = resolve(c.table);
        if (o.threads < 0) throw ConfigError("--threads must be >= 0");
    } catch (const ConfigError& e) {
        report_error("config", e.what(), config_error, o.subcommand);
        return config_error;
    }

    try {
        c.out = o.out;
        fs::create_directories(c.out);
    } catch (const std::exception& e) {
        report_error("io", e.what(), io_error, o.subcommand);
        return io_error;
    }
    if (o.threads > 0) omp_set_num_threads(o.threads);

    const auto start = std::chrono::steady_clock::now();
    try {
        if (o.subcommand == "solve-p0") cmd_solve_p0(c, false);
        else if (o.subcommand == "solve-p1") cmd_solve_p0(c, true);
        else if (o.subcommand == "solve-pdelta") cmd_solve_pdelta(c);
        else if (o.subcommand == "sweep-error") cmd_sweep(c);
        else if (o.subcommand == "simulate-bounds") cmd_bounds(c);
        else if (o.subcommand == "coupling-rate") cmd_coupling(c);
        else if (o.subcommand == "compare-bs") cmd_compare(c);
        else if (o.subcommand == "gamma-diag") cmd_gamma(c);

        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::vector<std::pair<std::string, std::string>> run{
            {"run.version", version},
            {"run.subcommand", o.subcommand},
            {"run.seed", std::to_string(c.settings.mc.seed)},
            {"run.threads", std::to_string(o.threads > 0 ? o.threads : omp_get_max_threads())},
            {"run.elapsed_s", format_double(elapsed)},
        };
        run.insert(run.end(), c.run_info.begin(), c.run_info.end());
        c.table.write_ini(c.out / "manifest.ini", run);
    } catch (const ConfigError& e) {
        report_error("config", e.what(), config_error, o.subcommand);
        return config_error;
    } catch (const SolverError& e) {
        report_error("solver", e.what(), solver_error, o.subcommand);
        return solver_error;
    } catch (const IoError& e) {
        report_error("io", e.what(), io_error, o.subcommand);
        return io_error;
    } catch (const fs::filesystem_error& e) {
        report_error("io", e.what(), io_error, o.subcommand);
        return io_error;
    } catch (const Error& e) {
        report_error("io", e.what(), io_error, o.subcommand);
        return io_error;
    }
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args)
{
    CLI::App app{"Worst-case option prices under uncertain volatility with stochastic bounds", "uvsb"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1, 1);
    app.fallthrough();

    Options o;
    app.add_option("--config", o.config, "INI configuration file");
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_option("--seed", o.seed, "Monte Carlo seed (unsigned 64-bit)");
    app.add_option("--threads", o.threads, "worker thread cap (0 = OpenMP default)");
    app.add_option("--set", o.overrides, "override section.key=value (repeatable)")->allow_extra_args(false);
    app.add_flag("--paper-exact", o.paper_exact, "unguarded optimizer (clamped stationary point)");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"solve-p0", "leading-order price P0 and its control"},
        {"solve-p1", "P0 and the first correction P1"},
        {"solve-pdelta", "full two-dimensional worst-case price"},
        {"sweep-error", "error(delta) sweep and convergence fit"},
        {"simulate-bounds", "CIR paths and the stochastic volatility band"},
        {"coupling-rate", "Monte Carlo coupling rate of X^delta against X^0"},
        {"compare-bs", "P0 against constant-volatility prices"},
        {"gamma-diag", "sign structure of the discrete gammas"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help)->callback([&o, name = name] { o.subcommand = name; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return ok;
    } catch (const CLI::CallForVersion&) {
        std::cout << version << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help();
        report_error("usage", e.what(), config_error, "");
        return config_error;
    }
    return execute(o);
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run(args);
}

}  // namespace uvsb::cli
