#pragma once

// Parameter sweeps over the compass model: grid expansion, engine selection,
// per-row evaluation with error isolation, figure presets, and deterministic
// CSV output.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compass/fermion_echo.hpp"
#include "compass/yield_engine.hpp"

namespace compass {

inline constexpr const char* kCodeVersion = "1.0.0";

enum class Engine { auto_select, fermion, ed };

[[nodiscard]] const char* to_string(Engine e) noexcept;
/// Accepts "auto", "fermion", "ed".
[[nodiscard]] std::optional<Engine> parse_engine(const std::string& name);

/// One grid point. Defaults are the figure settings at B = 0.9, theta = 0.
struct PointParams {
    double B = 0.9;
    double theta = 0.0;
    double T = 0.0;
    double k_S = 0.1;
    int N = 1000;
    double g0 = 1.0;
    double J = 1.0;
    double nuclear_moment = 1.0;
    double omega = 0.0;
};

/// Parameters that may be swept.
inline constexpr const char* kAxisNames[] = {"B", "theta", "T", "k_S", "N", "g0"};

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct EchoTraceConfig {
    bool enabled = false;
    double t_max = 20.0;
    std::size_t points = 201;  // uniform grid on [0, t_max]
};

struct SweepSpec {
    std::string name = "sweep";
    std::vector<SweepAxis> axes;
    PointParams fixed;
    bool want_phi_s = true;
    bool want_lambda_theta = false;
    EchoTraceConfig echo;
    QuadratureConfig quadrature;
    Engine engine = Engine::auto_select;
    bool validate = false;  // auto engine: use ED for N <= 12 and cross-check
    int cutoff_modes = kDefaultCutoffModes;
    double fd_step = kDefaultFdStep;
};

/// Structured configuration error naming the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Checks SweepSpec invariants; throws ConfigError. Sorts every axis ascending.
void validate(SweepSpec& spec);

struct SweepRow {
    PointParams params;
    double lambda = 0.0;
    std::optional<double> phi_s;
    std::optional<double> phi_s_err;
    std::optional<double> lambda_theta;
    std::optional<double> lambda_theta_err;
    std::vector<double> echo;  // on the sweep's echo grid when requested
    std::string engine;
    std::string status = "ok";
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<double> echo_times;
};

/// Evaluates every grid point; rows are in lexicographic axis order with the
/// last axis varying fastest. A failing point records its error in `status`
/// and leaves its outputs empty. Results do not depend on `threads`.
[[nodiscard]] SweepTable run_sweep(SweepSpec spec, unsigned threads = 1);

/// Expanded grid points in row order.
[[nodiscard]] std::vector<PointParams> expand_grid(const SweepSpec& spec);

/// Engine actually used at a point: ED for odd N, or N <= 12 in validation
/// mode; fermion otherwise.
[[nodiscard]] Engine resolve_engine(const SweepSpec& spec, const PointParams& p);

/// 64-bit FNV-1a hash of the canonical serialization of the sweep.
[[nodiscard]] std::string config_hash(const SweepSpec& spec);

/// Couplings of one grid point.
[[nodiscard]] DerivedCouplings point_couplings(const PointParams& p);

/// Product yield at one point, with an optional pinned sampling frequency so
/// neighbouring points share the same quadrature grid.
[[nodiscard]] YieldResult point_yield(const PointParams& p, Engine engine, const QuadratureConfig& cfg,
                                      std::optional<double> max_frequency = std::nullopt);

// Figure presets. Grid sizes, B_max and the T / k_S legend lists are defaults
// chosen here; the fixed physical parameters are the published settings.
inline constexpr double kFig2BMax = 2.0;
inline constexpr std::size_t kFig2Points = 61;
inline constexpr std::size_t kFig3Points = 121;

[[nodiscard]] SweepSpec preset_fig2();
/// Two θ-sweeps at B = 0.9: varying T with k_S = 0.1, and varying k_S with
/// T = 0.01. Both request lambda_theta.
[[nodiscard]] std::vector<SweepSpec> preset_fig3();

/// Column names of the sweep CSV, in order.
[[nodiscard]] const std::vector<std::string>& csv_columns();

/// Writes '#' metadata lines, the header and one line per row. Floats use the
/// shortest round-trip representation; absent outputs are empty fields.
void write_csv(const SweepTable& table, std::ostream& out);
/// Throws std::runtime_error naming the path on I/O failure.
void write_csv(const SweepTable& table, const std::filesystem::path& path);

/// Long-format echo traces: B, theta, T, k_S, N, g0, J, t, L.
void write_echo_csv(const SweepTable& table, std::ostream& out);
void write_echo_csv(const SweepTable& table, const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

}  // namespace compass
