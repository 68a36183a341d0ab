// compass: command-line front end for echo, yield and sweep runs.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compass/config.hpp"
#include "compass/parallel.hpp"
#include "compass/sweep.hpp"
#include "compass/validation.hpp"
#include "compass/yield_engine.hpp"

namespace {

struct CommonOptions {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config, "key=value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", opts.overrides, "override a configuration key (key=value), repeatable");
    cmd->add_option("--out", opts.out, "output CSV path (default: stdout)");
    cmd->add_option("--threads", opts.threads, "worker threads (default: COMPASS_THREADS or all cores)");
}

compass::SweepSpec build_spec(compass::SweepSpec base, const CommonOptions& opts) {
    compass::ConfigEntries entries;
    if (!opts.config.empty()) entries = compass::parse_config_file(opts.config);
    for (const auto& text : opts.overrides) {
        const auto [key, value] = compass::parse_assignment(text);
        compass::set_entry(entries, key, value);
    }
    return compass::apply_config(std::move(base), entries);
}

void emit(const compass::SweepTable& table, const std::string& out, bool echo) {
    if (out.empty()) {
        echo ? compass::write_echo_csv(table, std::cout) : compass::write_csv(table, std::cout);
        return;
    }
    echo ? compass::write_echo_csv(table, std::filesystem::path(out))
         : compass::write_csv(table, std::filesystem::path(out));
}

// fig3.csv -> fig3_T.csv
std::string with_suffix(const std::string& out, const std::string& name) {
    if (out.empty()) return out;
    std::filesystem::path p(out);
    const std::string suffix = name.substr(name.find('_'));
    return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

int run_table(compass::SweepSpec spec, const CommonOptions& opts) {
    const compass::SweepTable table = compass::run_sweep(spec, compass::resolve_threads(opts.threads));
    if (spec.want_phi_s || spec.want_lambda_theta) {
        emit(table, opts.out, false);
        if (spec.echo.enabled) {
            const std::string echo_out = opts.out.empty() ? std::string() : opts.out + ".echo.csv";
            emit(table, echo_out, true);
        }
    } else {
        emit(table, opts.out, true);
    }
    std::size_t failed = 0;
    for (const auto& row : table.rows) failed += row.status != "ok";
    if (failed) std::cerr << failed << " of " << table.rows.size() << " rows reported errors\n";
    return failed ? 2 : 0;
}

void print_single_point_summary(const compass::SweepSpec& spec, const compass::SweepTable& table) {
    if (table.rows.size() != 1 || !table.rows[0].phi_s) return;
    const auto& p = table.rows[0].params;
    const auto c = compass::point_couplings(p);
    std::fprintf(stderr, "lambda = %.6g, lambda+ = %.6g, lambda- = %.6g\n", c.lambda, c.lambda_plus, c.lambda_minus);
    std::fprintf(stderr, "Phi_S = %.12f +- %.2e (%s)\n", *table.rows[0].phi_s, *table.rows[0].phi_s_err,
                 table.rows[0].engine.c_str());
    if (c.cos_theta > 0.0 && c.g > 0.0 && c.lambda != 1.0) {
        const auto approx =
            compass::yield_small_ks(c.lambda, p.J, c.g, p.theta, p.N, spec.cutoff_modes, p.k_S);
        const double gamma = compass::gaussian_rate(p.N, p.J, c, spec.cutoff_modes);
        const auto gauss = compass::yield_gaussian(gamma, p.k_S);
        std::fprintf(stderr, "small-k_S estimate (K_c = %d): %.8f, k_S/(2 sqrt(gamma)) = %.3g\n", spec.cutoff_modes,
                     approx.phi_s, approx.validity_ratio);
        std::fprintf(stderr, "Gaussian estimate: gamma = %.6g, integrated %.8f, printed form %.8f\n", gamma,
                     gauss.rederived, gauss.printed);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radical-pair compass with Ising nuclear-spin baths"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* echo = app.add_subcommand("echo", "Loschmidt echo traces L(t)");
    auto* yield = app.add_subcommand("yield", "singlet product yield at one point or over a grid");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep (at least one axis)");
    auto* fig2 = app.add_subcommand("fig2", "B x theta yield map at T = 0.2");
    auto* fig3 = app.add_subcommand("fig3", "theta sweeps of Phi_S and Lambda at B = 0.9");
    auto* check = app.add_subcommand("check", "run the oracle validation suites");
    for (auto* cmd : {echo, yield, sweep, fig2, fig3}) add_common(cmd, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            const auto report = compass::run_validation();
            compass::print_report(report, std::cout);
            return report.passed() ? 0 : 1;
        }
        if (echo->parsed()) {
            compass::SweepSpec base;
            base.name = "echo";
            base.want_phi_s = false;
            base.echo.enabled = true;
            return run_table(build_spec(base, opts), opts);
        }
        if (yield->parsed()) {
            compass::SweepSpec base;
            base.name = "yield";
            const auto spec = build_spec(base, opts);
            const auto table = compass::run_sweep(spec, compass::resolve_threads(opts.threads));
            emit(table, opts.out, false);
            print_single_point_summary(spec, table);
            return table.rows.size() == 1 && table.rows[0].status != "ok" ? 2 : 0;
        }
        if (sweep->parsed()) {
            auto spec = build_spec(compass::SweepSpec{}, opts);
            if (spec.axes.empty()) throw compass::ConfigError("axes", "sweep needs at least one list-valued parameter");
            return run_table(spec, opts);
        }
        if (fig2->parsed()) return run_table(build_spec(compass::preset_fig2(), opts), opts);
        if (fig3->parsed()) {
            int status = 0;
            for (auto& preset : compass::preset_fig3()) {
                CommonOptions panel = opts;
                panel.out = with_suffix(opts.out, preset.name);
                status = std::max(status, run_table(build_spec(preset, panel), panel));
            }
            return status;
        }
    } catch (const compass::ConfigError& e) {
        std::cerr << "configuration error [" << e.key() << "]: " << e.what() << '\n';
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
