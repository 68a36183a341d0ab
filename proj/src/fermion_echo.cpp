#include "compass/fermion_echo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace compass {

namespace {

struct BlochAxis {
    double x = 0.0;
    double z = 0.0;
};

// <sigma> of the upper eigenvector of a real symmetric block.
BlochAxis upper_axis(const Block2& h) {
    const double r = h.half_gap();
    return {h.b / r, 0.5 * (h.a - h.d) / r};
}

double dot(BlochAxis p, BlochAxis q) { return p.x * q.x + p.z * q.z; }

void require_even(int N) {
    if (N < 2 || N % 2 != 0)
        throw std::invalid_argument("free-fermion echo needs an even N >= 2 (got " + std::to_string(N) +
                                    "); use ed_oracle for this N");
}

}  // namespace

ModeGrid build_mode_grid(int N) {
    require_even(N);
    ModeGrid grid;
    grid.N = N;
    grid.momenta.reserve(static_cast<std::size_t>(N / 2));
    for (int j = 1; j <= N / 2; ++j) grid.momenta.push_back((2.0 * j - 1.0) * std::numbers::pi / N);
    return grid;
}

double Block2::half_gap() const noexcept {
    return std::hypot(0.5 * (a - d), b);
}

double mode_energy(double k, double field, double J) {
    return 2.0 * J * std::hypot(field - std::cos(k), std::sin(k));
}

Block2 even_block(double k, double field, double J) {
    return {0.0, 2.0 * J * std::sin(k), 4.0 * J * (field - std::cos(k))};
}

ModeBlock build_mode_block(double k, const DerivedCouplings& couplings, double J) {
    if (!(k > 0.0 && k < std::numbers::pi)) throw std::invalid_argument("mode momentum must lie in (0, pi)");
    ModeBlock block;
    block.k = k;
    block.h_plus = even_block(k, couplings.lambda_plus, J);
    block.h_minus = even_block(k, couplings.lambda_minus, J);
    block.h_init = even_block(k, couplings.lambda, J);
    block.a_plus = 2.0 * J * (couplings.lambda_plus - std::cos(k));
    block.a_minus = 2.0 * J * (couplings.lambda_minus - std::cos(k));
    return block;
}

std::complex<double> LogPolar::value() const {
    return std::polar(std::exp(log_abs), arg);
}

EchoContext::EchoContext(int N, double J, const DerivedCouplings& couplings, double T,
                         std::optional<double> preparation_field)
    : N_(N), T_(T) {
    require_even(N);
    if (!(J > 0.0)) throw std::invalid_argument("Ising coupling J must be > 0");
    if (!(T >= 0.0)) throw std::invalid_argument("temperature must be >= 0");

    const double prep = preparation_field.value_or(couplings.lambda);
    const ModeGrid grid = build_mode_grid(N);
    const std::size_t n = grid.momenta.size();
    eps_plus_.resize(n);
    eps_minus_.resize(n);
    s_.resize(n);
    q_.resize(n);
    w_.resize(n);
    u_.resize(n);
    v_.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double k = grid.momenta[i];
        const Block2 hp = even_block(k, couplings.lambda_plus, J);
        const Block2 hm = even_block(k, couplings.lambda_minus, J);
        const Block2 h0 = even_block(k, prep, J);

        eps_plus_[i] = hp.half_gap();
        eps_minus_[i] = hm.half_gap();

        const BlochAxis np = upper_axis(hp);
        const BlochAxis nm = upper_axis(hm);
        const BlochAxis n0 = upper_axis(h0);
        const BlochAxis ground{-n0.x, -n0.z};

        // Pair populations: the four levels sit at center - eps, center (x2),
        // center + eps, so with x = exp(-eps/T) the partition sum is (1 + x)^2.
        double x = 0.0;
        if (T > 0.0) x = std::exp(-h0.half_gap() / T);
        const double Z = (1.0 + x) * (1.0 + x);
        const double s = (1.0 + x * x) / Z;
        const double d = (1.0 - x * x) / Z;

        s_[i] = s;
        q_[i] = s * dot(nm, np);
        w_[i] = 2.0 * x / Z;
        u_[i] = d * dot(nm, ground);
        v_[i] = d * dot(np, ground);
    }
    max_frequency_ = n == 0 ? 0.0 : *std::max_element(eps_plus_.begin(), eps_plus_.end()) / std::numbers::pi;
}

std::vector<std::complex<double>> EchoContext::mode_factors(double t) const {
    std::vector<std::complex<double>> out(mode_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double cp = std::cos(eps_plus_[i] * t), sp = std::sin(eps_plus_[i] * t);
        const double cm = std::cos(eps_minus_[i] * t), sm = std::sin(eps_minus_[i] * t);
        out[i] = {s_[i] * cm * cp + q_[i] * sm * sp + w_[i], u_[i] * sm * cp - v_[i] * cm * sp};
    }
    return out;
}

LogPolar EchoContext::trace_factor(double t) const {
    LogPolar acc;
    for (const auto& f : mode_factors(t)) {
        acc.log_abs += std::log(std::abs(f));
        acc.arg += std::arg(f);
    }
    acc.arg = std::remainder(acc.arg, 2.0 * std::numbers::pi);
    return acc;
}

double EchoContext::log_echo(double t) const {
    double acc = 0.0;
    for (const auto& f : mode_factors(t)) acc += std::log(std::norm(f));
    return acc;
}

double EchoContext::echo(double t) const {
    return std::exp(log_echo(t));
}

void EchoContext::echo_uniform(double t0, double dt, std::span<double> out) const {
    const std::size_t n_modes = mode_count();
    constexpr std::size_t B = kReseedInterval;
    double mant[B];
    int expo[B];

    for (std::size_t start = 0; start < out.size(); start += B) {
        const std::size_t len = std::min(B, out.size() - start);
        const double t_start = t0 + static_cast<double>(start) * dt;
        std::fill(mant, mant + len, 1.0);
        std::fill(expo, expo + len, 0);

        for (std::size_t m = 0; m < n_modes; ++m) {
            double cp = std::cos(eps_plus_[m] * t_start), sp = std::sin(eps_plus_[m] * t_start);
            double cm = std::cos(eps_minus_[m] * t_start), sm = std::sin(eps_minus_[m] * t_start);
            const double rcp = std::cos(eps_plus_[m] * dt), rsp = std::sin(eps_plus_[m] * dt);
            const double rcm = std::cos(eps_minus_[m] * dt), rsm = std::sin(eps_minus_[m] * dt);
            const double s = s_[m], q = q_[m], w = w_[m], u = u_[m], v = v_[m];

            for (std::size_t j = 0; j < len; ++j) {
                const double re = s * cm * cp + q * sm * sp + w;
                const double im = u * sm * cp - v * cm * sp;
                mant[j] *= re * re + im * im;

                const double cp2 = cp * rcp - sp * rsp;
                sp = sp * rcp + cp * rsp;
                cp = cp2;
                const double cm2 = cm * rcm - sm * rsm;
                sm = sm * rcm + cm * rsm;
                cm = cm2;
            }
            if (m % 16 == 15) {
                for (std::size_t j = 0; j < len; ++j) {
                    int e = 0;
                    mant[j] = std::frexp(mant[j], &e);
                    expo[j] += e;
                }
            }
        }
        for (std::size_t j = 0; j < len; ++j) out[start + j] = std::ldexp(mant[j], expo[j]);
    }
}

double echo_pure(int N, double J, const DerivedCouplings& couplings, double t) {
    return EchoContext(N, J, couplings, 0.0).echo(t);
}

double echo_thermal(int N, double J, const DerivedCouplings& couplings, double T, double t) {
    if (!(T > 0.0)) throw std::invalid_argument("echo_thermal requires T > 0; use echo_pure at T = 0");
    return EchoContext(N, J, couplings, T).echo(t);
}

std::complex<double> echo_trace_factor(int N, double J, const DerivedCouplings& couplings, double T, double t) {
    return EchoContext(N, J, couplings, T).trace_factor(t).value();
}

namespace {

void validate_grid(std::span<const double> times) {
    if (times.empty()) throw std::invalid_argument("time grid is empty");
    if (times.front() != 0.0) throw std::invalid_argument("time grid must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
}

}  // namespace

EchoSeries echo_series(int N, double J, const DerivedCouplings& couplings, double T, std::span<const double> times) {
    validate_grid(times);
    const EchoContext ctx(N, J, couplings, T);
    EchoSeries series;
    series.times.assign(times.begin(), times.end());
    series.values.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) series.values[i] = ctx.echo(times[i]);
    return series;
}

TraceSeries trace_series(const EchoContext& ctx, std::span<const double> times) {
    validate_grid(times);
    TraceSeries out;
    out.times.assign(times.begin(), times.end());
    out.z.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) out.z[i] = ctx.trace_factor(times[i]).value();
    return out;
}

std::vector<std::complex<double>> decoherence_factor(const TraceSeries& env1, const TraceSeries& env2) {
    if (env1.times != env2.times || env1.z.size() != env1.times.size() || env2.z.size() != env2.times.size())
        throw std::invalid_argument("decoherence_factor: environments sampled on different time grids");
    std::vector<std::complex<double>> d(env1.z.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = env1.z[i] * std::conj(env2.z[i]);
    return d;
}

EchoSeries pair_echo_series(const EchoContext& env1, const EchoContext& env2, std::span<const double> times) {
    const TraceSeries z1 = trace_series(env1, times);
    const TraceSeries z2 = trace_series(env2, times);
    EchoSeries series;
    series.times = z1.times;
    auto d = decoherence_factor(z1, z2);
    series.values.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) series.values[i] = std::abs(d[i]);
    series.d_values = std::move(d);
    return series;
}

double gaussian_rate(int N, double J, const DerivedCouplings& couplings, int cutoff_modes) {
    if (cutoff_modes < 1) throw std::invalid_argument("cutoff mode count must be >= 1");
    const double detuning = 1.0 - couplings.lambda;
    if (detuning == 0.0) throw std::domain_error("gaussian_rate diverges at the critical point lambda = 1");
    const double kc3 = std::pow(static_cast<double>(cutoff_modes), 3);
    const double c2 = couplings.cos_theta * couplings.cos_theta;
    return 8.0 * J * J * couplings.g * couplings.g * N * kc3 * c2 / (3.0 * std::numbers::pi * detuning * detuning);
}

GaussianFit fit_gaussian_decay(const EchoSeries& series, double floor) {
    const auto& t = series.times;
    const auto& L = series.values;
    double stt = 0.0, sty = 0.0;
    std::size_t end = 1;
    for (; end < L.size(); ++end) {
        if (!(L[end] > floor) || L[end] <= 0.0) break;
        if (end + 1 < L.size() && L[end + 1] > L[end]) {
            ++end;
            break;
        }
    }
    GaussianFit fit;
    if (end < 2) return fit;
    for (std::size_t i = 1; i < end; ++i) {
        const double t2 = t[i] * t[i];
        stt += t2 * t2;
        sty += t2 * std::log(L[i]);
    }
    fit.rate = -sty / stt;
    double res2 = 0.0, y2 = 0.0;
    for (std::size_t i = 1; i < end; ++i) {
        const double y = std::log(L[i]);
        const double r = y + fit.rate * t[i] * t[i];
        res2 += r * r;
        y2 += y * y;
    }
    fit.rel_residual = y2 > 0.0 ? std::sqrt(res2 / y2) : 0.0;
    fit.window_end = t[end - 1];
    fit.points = end - 1;
    return fit;
}

CutoffCalibration calibrate_cutoff(int N, double J, const DerivedCouplings& couplings, int max_cutoff) {
    const EchoContext ctx(N, J, couplings, 0.0);
    EchoSeries series;
    const double dt = 1e-3 / std::max(ctx.max_frequency(), 1e-3);
    const double floor = 0.7;
    for (std::size_t i = 0; static_cast<double>(i) * dt <= 50.0; ++i) {
        const double t = static_cast<double>(i) * dt;
        series.times.push_back(t);
        series.values.push_back(ctx.echo(t));
        const std::size_t n = series.values.size();
        if (series.values.back() < floor || (n > 2 && series.values[n - 1] > series.values[n - 2])) break;
    }
    const GaussianFit fit = fit_gaussian_decay(series, floor);
    CutoffCalibration best;
    best.fitted_rate = fit.rate;
    double best_gap = INFINITY;
    for (int kc = 1; kc <= max_cutoff; ++kc) {
        const double gamma = gaussian_rate(N, J, couplings, kc);
        const double gap = std::abs(std::log(gamma / fit.rate));
        if (gap < best_gap) {
            best_gap = gap;
            best.cutoff_modes = kc;
            best.predicted_rate = gamma;
        }
    }
    return best;
}

}  // namespace compass
