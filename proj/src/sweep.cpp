#include "compass/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "compass/ed_oracle.hpp"
#include "compass/parallel.hpp"

namespace compass {

unsigned resolve_threads(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("COMPASS_THREADS")) {
        int value = 0;
        const char* end = env + std::char_traits<char>::length(env);
        if (auto [ptr, ec] = std::from_chars(env, end, value); ec == std::errc{} && ptr == end && value > 0)
            return static_cast<unsigned>(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

const char* to_string(Engine e) noexcept {
    switch (e) {
        case Engine::auto_select: return "auto";
        case Engine::fermion: return "fermion";
        case Engine::ed: return "ed";
    }
    return "unknown";
}

std::optional<Engine> parse_engine(const std::string& name) {
    if (name == "auto") return Engine::auto_select;
    if (name == "fermion") return Engine::fermion;
    if (name == "ed") return Engine::ed;
    return std::nullopt;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return {buf, ptr};
}

namespace {

bool is_axis_name(const std::string& name) {
    return std::find_if(std::begin(kAxisNames), std::end(kAxisNames),
                        [&](const char* a) { return name == a; }) != std::end(kAxisNames);
}

void set_param(PointParams& p, const std::string& name, double value) {
    if (name == "B") p.B = value;
    else if (name == "theta") p.theta = value;
    else if (name == "T") p.T = value;
    else if (name == "k_S") p.k_S = value;
    else if (name == "N") p.N = static_cast<int>(value);
    else if (name == "g0") p.g0 = value;
    else throw ConfigError(name, "not a sweepable parameter");
}

// Domain check of one value of a sweepable parameter.
void check_value(const std::string& name, double v) {
    auto fail = [&](const std::string& why) { throw ConfigError(name, why + " (got " + format_double(v) + ")"); };
    if (!std::isfinite(v)) fail("value must be finite");
    if (name == "B" && v < 0.0) fail("must be >= 0");
    if (name == "theta" && !(v >= 0.0 && v <= std::numbers::pi / 2)) fail("must lie in [0, pi/2]");
    if (name == "T" && v < 0.0) fail("must be >= 0");
    if (name == "k_S" && !(v > 0.0)) fail("must be > 0");
    if (name == "N" && (v < 2.0 || v != std::floor(v) || v > 1e7)) fail("must be an integer >= 2");
}

void check_engine_for_n(const SweepSpec& spec, int N) {
    if (spec.engine == Engine::fermion && N % 2 != 0)
        throw ConfigError("N", "engine=fermion needs even N (got " + std::to_string(N) + ")");
    if (spec.engine == Engine::ed && N > ed::kMaxSpins)
        throw ConfigError("N", "engine=ed is limited to N <= " + std::to_string(ed::kMaxSpins));
    if (spec.engine == Engine::auto_select && N % 2 != 0 && N > ed::kMaxSpins)
        throw ConfigError("N", "odd N is only supported by the ED engine (N <= " + std::to_string(ed::kMaxSpins) + ")");
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',') c = ';';
        else if (c == '\n' || c == '\r' || c == '"') c = ' ';
    }
    return s;
}

}  // namespace

void validate(SweepSpec& spec) {
    for (std::size_t i = 0; i < spec.axes.size(); ++i) {
        SweepAxis& axis = spec.axes[i];
        if (!is_axis_name(axis.name)) throw ConfigError(axis.name, "not a sweepable parameter");
        for (std::size_t j = 0; j < i; ++j)
            if (spec.axes[j].name == axis.name) throw ConfigError(axis.name, "axis listed twice");
        if (axis.values.empty()) throw ConfigError(axis.name, "axis has no values");
        for (double v : axis.values) check_value(axis.name, v);
        std::sort(axis.values.begin(), axis.values.end());
        if (std::adjacent_find(axis.values.begin(), axis.values.end()) != axis.values.end())
            throw ConfigError(axis.name, "axis contains duplicate values");
        if (axis.name == "N")
            for (double v : axis.values) check_engine_for_n(spec, static_cast<int>(v));
    }
    const PointParams& f = spec.fixed;
    check_value("B", f.B);
    check_value("theta", f.theta);
    check_value("T", f.T);
    check_value("k_S", f.k_S);
    check_value("N", f.N);
    check_value("g0", f.g0);
    check_engine_for_n(spec, f.N);
    if (!(f.J > 0.0)) throw ConfigError("J", "must be > 0");
    if (!(f.nuclear_moment > 0.0)) throw ConfigError("nuclear_moment", "must be > 0");
    if (!(f.omega >= 0.0)) throw ConfigError("omega", "must be >= 0");
    if (spec.cutoff_modes < 1) throw ConfigError("K_c", "must be >= 1");
    if (!(spec.fd_step > 0.0 && spec.fd_step < 0.25)) throw ConfigError("fd_step", "must lie in (0, 0.25)");
    if (!(spec.quadrature.rel_tol > 0.0)) throw ConfigError("rel_tol", "must be > 0");
    if (!(spec.quadrature.truncation_eps > 0.0 && spec.quadrature.truncation_eps < 1.0))
        throw ConfigError("truncation_eps", "must lie in (0, 1)");
    if (!(spec.quadrature.min_points_per_period >= 4.0)) throw ConfigError("density", "must be >= 4");
    if (spec.echo.enabled) {
        if (!(spec.echo.t_max > 0.0)) throw ConfigError("t_max", "must be > 0");
        if (spec.echo.points < 2) throw ConfigError("t_points", "must be >= 2");
    }
    if (!spec.want_phi_s && !spec.want_lambda_theta && !spec.echo.enabled)
        throw ConfigError("outputs", "no outputs requested");
}

std::vector<PointParams> expand_grid(const SweepSpec& spec) {
    std::size_t total = 1;
    for (const auto& axis : spec.axes) total *= axis.values.size();
    std::vector<PointParams> points;
    points.reserve(total);
    for (std::size_t index = 0; index < total; ++index) {
        PointParams p = spec.fixed;
        std::size_t rest = index;
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const auto& values = spec.axes[a].values;
            set_param(p, spec.axes[a].name, values[rest % values.size()]);
            rest /= values.size();
        }
        points.push_back(p);
    }
    return points;
}

Engine resolve_engine(const SweepSpec& spec, const PointParams& p) {
    if (spec.engine != Engine::auto_select) return spec.engine;
    if (p.N % 2 != 0) return Engine::ed;
    if (spec.validate && p.N <= ed::kMaxSpins) return Engine::ed;
    return Engine::fermion;
}

DerivedCouplings point_couplings(const PointParams& p) {
    return derive_couplings(FieldConfig{p.B, p.theta, p.nuclear_moment, p.omega}, EnvironmentParams{p.N, p.J, p.g0});
}

YieldResult point_yield(const PointParams& p, Engine engine, const QuadratureConfig& cfg,
                        std::optional<double> max_frequency) {
    validate(ThermalParams{p.T});
    const DerivedCouplings c = point_couplings(p);
    const double f_max = max_frequency.value_or(quadrature_frequency(p.N, p.J, c));
    if (engine == Engine::ed) {
        const auto ctx = ed::make_echo_context(p.N, p.J, c, p.T, ed::Boundary::periodic);
        return product_yield(make_provider(ctx, f_max), p.k_S, cfg);
    }
    const EchoContext ctx(p.N, p.J, c, p.T);
    EchoProvider provider = make_provider(ctx);
    provider.max_frequency = f_max;
    return product_yield(provider, p.k_S, cfg);
}

namespace {

std::vector<double> echo_grid(const EchoTraceConfig& cfg) {
    std::vector<double> times(cfg.points);
    for (std::size_t i = 0; i < cfg.points; ++i)
        times[i] = cfg.t_max * static_cast<double>(i) / static_cast<double>(cfg.points - 1);
    return times;
}

SweepRow evaluate_row(const SweepSpec& spec, const PointParams& p, const std::vector<double>& times) {
    SweepRow row;
    row.params = p;
    const Engine engine = resolve_engine(spec, p);
    row.engine = to_string(engine);
    try {
        const DerivedCouplings c = point_couplings(p);
        row.lambda = c.lambda;
        const double f_max = quadrature_frequency(p.N, p.J, c);

        if (spec.want_phi_s) {
            const YieldResult y = point_yield(p, engine, spec.quadrature, f_max);
            row.phi_s = y.phi_s;
            row.phi_s_err = y.estimated_error;
            if (engine == Engine::ed && spec.validate && p.N % 2 == 0 && p.T == 0.0) {
                const YieldResult other = point_yield(p, Engine::fermion, spec.quadrature, f_max);
                const double diff = std::abs(other.phi_s - y.phi_s);
                if (diff > 1e-6) row.status = "crosscheck failed: |dphi_s| = " + format_double(diff);
            }
        }
        if (spec.want_lambda_theta) {
            auto yield_of_theta = [&](double theta) {
                PointParams q = p;
                q.theta = theta;
                return point_yield(q, engine, spec.quadrature, f_max).phi_s;
            };
            const SensitivityResult s = sensitivity(yield_of_theta, p.theta, spec.fd_step);
            row.lambda_theta = s.lambda_theta;
            row.lambda_theta_err = s.estimated_error;
        }
        if (spec.echo.enabled) {
            row.echo.resize(times.size());
            if (engine == Engine::ed) {
                const auto ctx = ed::make_echo_context(p.N, p.J, c, p.T, ed::Boundary::periodic);
                for (std::size_t i = 0; i < times.size(); ++i) row.echo[i] = ctx.echo(times[i]);
            } else {
                const EchoContext ctx(p.N, p.J, c, p.T);
                for (std::size_t i = 0; i < times.size(); ++i) row.echo[i] = ctx.echo(times[i]);
            }
        }
    } catch (const std::exception& e) {
        const double lambda = row.lambda;
        row = SweepRow{};
        row.params = p;
        row.lambda = lambda;
        row.engine = to_string(engine);
        row.status = "error: " + sanitize(e.what());
    }
    return row;
}

std::string axes_summary(const SweepSpec& spec) {
    std::string out;
    for (const auto& axis : spec.axes) {
        if (!out.empty()) out += ' ';
        out += axis.name + "[" + std::to_string(axis.values.size()) + "]";
    }
    return out.empty() ? "none" : out;
}

std::string outputs_summary(const SweepSpec& spec) {
    std::string out;
    auto add = [&](const char* name) { out += out.empty() ? name : std::string(";") + name; };
    if (spec.want_phi_s) add("phi_s");
    if (spec.want_lambda_theta) add("lambda_theta");
    if (spec.echo.enabled) add("echo");
    return out;
}

}  // namespace

std::string config_hash(const SweepSpec& spec) {
    std::ostringstream s;
    s << "name=" << spec.name << '\n';
    for (const auto& axis : spec.axes) {
        s << "axis " << axis.name << '=';
        for (double v : axis.values) s << format_double(v) << ',';
        s << '\n';
    }
    const PointParams& f = spec.fixed;
    s << "B=" << format_double(f.B) << "\ntheta=" << format_double(f.theta) << "\nT=" << format_double(f.T)
      << "\nk_S=" << format_double(f.k_S) << "\nN=" << f.N << "\ng0=" << format_double(f.g0)
      << "\nJ=" << format_double(f.J) << "\nnuclear_moment=" << format_double(f.nuclear_moment)
      << "\nomega=" << format_double(f.omega) << "\noutputs=" << outputs_summary(spec)
      << "\nt_max=" << format_double(spec.echo.t_max) << "\nt_points=" << spec.echo.points
      << "\nrel_tol=" << format_double(spec.quadrature.rel_tol)
      << "\ntruncation_eps=" << format_double(spec.quadrature.truncation_eps)
      << "\ndensity=" << format_double(spec.quadrature.min_points_per_period)
      << "\nmax_refinements=" << spec.quadrature.max_refinements << "\nengine=" << to_string(spec.engine)
      << "\nvalidate=" << spec.validate << "\nK_c=" << spec.cutoff_modes << "\nfd_step=" << format_double(spec.fd_step)
      << '\n';
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s.str()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, h, 16);
    std::string hex(buf, ptr);
    return std::string(16 - hex.size(), '0') + hex;
}

SweepTable run_sweep(SweepSpec spec, unsigned threads) {
    validate(spec);
    const std::vector<PointParams> points = expand_grid(spec);
    SweepTable table;
    if (spec.echo.enabled) table.echo_times = echo_grid(spec.echo);
    table.rows.resize(points.size());
    parallel_for(points.size(), threads,
                 [&](std::size_t i) { table.rows[i] = evaluate_row(spec, points[i], table.echo_times); });
    table.metadata = {{"name", spec.name},
                      {"engine", to_string(spec.engine)},
                      {"code_version", kCodeVersion},
                      {"config_hash", config_hash(spec)},
                      {"axes", axes_summary(spec)},
                      {"outputs", outputs_summary(spec)}};
    return table;
}

namespace {

SweepAxis linspace_axis(std::string name, double lo, double hi, std::size_t n) {
    SweepAxis axis{std::move(name), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i)
        axis.values[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    axis.values.back() = hi;
    return axis;
}

PointParams figure_params() {
    PointParams p;
    p.N = 1000;
    p.g0 = 1.0;
    p.J = 1.0;
    p.k_S = 0.1;
    return p;
}

}  // namespace

SweepSpec preset_fig2() {
    SweepSpec spec;
    spec.name = "fig2";
    spec.fixed = figure_params();
    spec.fixed.T = 0.2;
    spec.axes = {linspace_axis("B", 0.0, kFig2BMax, kFig2Points),
                 linspace_axis("theta", 0.0, std::numbers::pi / 2, kFig2Points)};
    return spec;
}

std::vector<SweepSpec> preset_fig3() {
    SweepSpec by_temperature;
    by_temperature.name = "fig3_T";
    by_temperature.fixed = figure_params();
    by_temperature.fixed.B = 0.9;
    by_temperature.want_lambda_theta = true;
    by_temperature.axes = {SweepAxis{"T", {0.01, 0.1, 0.2, 0.5}},
                           linspace_axis("theta", 0.0, std::numbers::pi / 2, kFig3Points)};

    SweepSpec by_rate = by_temperature;
    by_rate.name = "fig3_kS";
    by_rate.fixed.T = 0.01;
    by_rate.axes = {SweepAxis{"k_S", {0.05, 0.1, 0.5}},
                    linspace_axis("theta", 0.0, std::numbers::pi / 2, kFig3Points)};
    return {by_temperature, by_rate};
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> columns = {"B",      "theta",     "T",         "k_S",          "N",
                                                     "g0",     "J",         "lambda",    "phi_s",        "phi_s_err",
                                                     "lambda_theta", "lambda_theta_err", "engine", "status"};
    return columns;
}

namespace {

void write_metadata(const SweepTable& table, std::ostream& out) {
    for (const auto& [key, value] : table.metadata) out << "# " << key << ": " << value << '\n';
}

void write_params(const PointParams& p, std::ostream& out) {
    out << format_double(p.B) << ',' << format_double(p.theta) << ',' << format_double(p.T) << ','
        << format_double(p.k_S) << ',' << p.N << ',' << format_double(p.g0) << ',' << format_double(p.J);
}

void write_optional(const std::optional<double>& v, std::ostream& out) {
    out << ',';
    if (v) out << format_double(*v);
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

void write_csv(const SweepTable& table, std::ostream& out) {
    write_metadata(table, out);
    const auto& columns = csv_columns();
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const SweepRow& row : table.rows) {
        write_params(row.params, out);
        out << ',' << format_double(row.lambda);
        write_optional(row.phi_s, out);
        write_optional(row.phi_s_err, out);
        write_optional(row.lambda_theta, out);
        write_optional(row.lambda_theta_err, out);
        out << ',' << row.engine << ',' << sanitize(row.status) << '\n';
    }
}

void write_csv(const SweepTable& table, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& out) { write_csv(table, out); });
}

void write_echo_csv(const SweepTable& table, std::ostream& out) {
    write_metadata(table, out);
    out << "B,theta,T,k_S,N,g0,J,t,L\n";
    for (const SweepRow& row : table.rows) {
        for (std::size_t i = 0; i < row.echo.size() && i < table.echo_times.size(); ++i) {
            write_params(row.params, out);
            out << ',' << format_double(table.echo_times[i]) << ',' << format_double(row.echo[i]) << '\n';
        }
    }
}

void write_echo_csv(const SweepTable& table, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& out) { write_echo_csv(table, out); });
}

}  // namespace compass
