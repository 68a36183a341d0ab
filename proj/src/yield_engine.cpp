#include "compass/yield_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace compass {

void validate(const QuadratureConfig& cfg) {
    if (!(cfg.rel_tol > 0.0)) throw std::invalid_argument("quadrature rel_tol must be > 0");
    if (!(cfg.truncation_eps > 0.0 && cfg.truncation_eps < 1.0))
        throw std::invalid_argument("quadrature truncation_eps must lie in (0, 1)");
    if (!(cfg.min_points_per_period >= 4.0)) throw std::invalid_argument("quadrature density must be >= 4");
    if (cfg.max_refinements < 1) throw std::invalid_argument("quadrature max_refinements must be >= 1");
}

EchoProvider make_provider(const EchoContext& ctx) {
    return {[&ctx](double t0, double dt, std::span<double> out) { ctx.echo_uniform(t0, dt, out); },
            ctx.max_frequency()};
}

EchoProvider make_provider(const ed::EchoContext& ctx, double max_frequency) {
    return {[&ctx](double t0, double dt, std::span<double> out) {
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = ctx.echo(t0 + static_cast<double>(i) * dt);
            },
            max_frequency};
}

EchoProvider make_provider(std::function<double(double)> echo, double max_frequency) {
    return {[echo = std::move(echo)](double t0, double dt, std::span<double> out) {
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = echo(t0 + static_cast<double>(i) * dt);
            },
            max_frequency};
}

double quadrature_frequency(int N, double J, const DerivedCouplings& couplings) {
    if (N % 2 != 0) return 2.0 * J * (1.0 + std::abs(couplings.lambda_plus)) / std::numbers::pi;
    double best = 0.0;
    for (double k : build_mode_grid(N).momenta) best = std::max(best, mode_energy(k, couplings.lambda_plus, J));
    return best / std::numbers::pi;
}

double singlet_population(double echo) {
    if (!(echo >= -1e-12 && echo <= 1.0 + 1e-12))
        throw std::invalid_argument("echo value outside [0, 1]: " + std::to_string(echo));
    return 0.5 * (1.0 + echo);
}

double singlet_population(std::complex<double> decoherence) {
    if (!(std::abs(decoherence) <= 1.0 + 1e-12))
        throw std::invalid_argument("decoherence factor modulus exceeds 1");
    return 0.5 * (1.0 + decoherence.real());
}

namespace {

constexpr std::size_t kChunk = 4096;

// h * sum_i w_i L(t0 + i h) exp(-k (t0 + i h)), with endpoint weights 1/2 when
// `trapezoid_ends` is set.
double weighted_sum(const EchoProvider& echo, double k_S, double t0, double h, std::size_t count, bool trapezoid_ends,
                    std::vector<double>& buffer) {
    double acc = 0.0;
    for (std::size_t start = 0; start < count; start += kChunk) {
        const std::size_t len = std::min(kChunk, count - start);
        buffer.resize(len);
        const double chunk_t0 = t0 + static_cast<double>(start) * h;
        echo.sample(chunk_t0, h, std::span<double>(buffer.data(), len));
        double part = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            const std::size_t i = start + j;
            double w = std::exp(-k_S * (chunk_t0 + static_cast<double>(j) * h));
            if (trapezoid_ends && (i == 0 || i + 1 == count)) w *= 0.5;
            part += w * buffer[j];
        }
        acc += part;
    }
    return acc;
}

}  // namespace

YieldResult product_yield(const EchoProvider& echo, double k_S, const QuadratureConfig& cfg) {
    validate(ReactionParams{k_S});
    validate(cfg);
    if (!echo.sample) throw std::invalid_argument("echo provider has no sampler");

    const double t_max = std::log(1.0 / cfg.truncation_eps) / k_S;
    double h = 0.05 / k_S;
    if (echo.max_frequency > 0.0) h = std::min(h, 1.0 / (cfg.min_points_per_period * echo.max_frequency));
    std::size_t intervals = static_cast<std::size_t>(std::ceil(t_max / h));
    intervals = std::max<std::size_t>(intervals, 4);
    h = t_max / static_cast<double>(intervals);

    std::vector<double> buffer;
    YieldResult result;
    result.truncation_time = t_max;

    double trap = h * weighted_sum(echo, k_S, 0.0, h, intervals + 1, true, buffer);
    result.n_evaluations = intervals + 1;
    const double tail = 0.5 * std::exp(-k_S * t_max);

    double prev_phi = 0.5 + 0.5 * k_S * trap;
    for (int level = 1; level <= cfg.max_refinements; ++level) {
        const double mids = weighted_sum(echo, k_S, 0.5 * h, h, intervals, false, buffer);
        result.n_evaluations += intervals;
        const double refined = 0.5 * trap + 0.5 * h * mids;
        h *= 0.5;
        intervals *= 2;

        const double richardson = refined + (refined - trap) / 3.0;
        const double change = 0.5 * k_S * std::abs(refined - trap);
        const double phi = 0.5 + 0.5 * k_S * richardson;
        trap = refined;
        if (change <= cfg.rel_tol * std::abs(phi)) {
            result.phi_s = phi;
            result.estimated_error = change / 3.0 + tail;
            return result;
        }
        if (level == cfg.max_refinements)
            throw QuadratureError("product_yield did not converge after " + std::to_string(level) +
                                      " refinements (last two estimates " + std::to_string(prev_phi) + ", " +
                                      std::to_string(phi) + ")",
                                  prev_phi, phi);
        prev_phi = phi;
    }
    return result;
}

double scaled_erfc(double x) {
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    // Asymptotic series; at x >= 25 the fourth term is below 1e-10.
    const double inv2 = 1.0 / (2.0 * x * x);
    const double series = 1.0 - inv2 + 3.0 * inv2 * inv2 - 15.0 * inv2 * inv2 * inv2;
    return series / (x * std::sqrt(std::numbers::pi));
}

GaussianYield yield_gaussian(double gamma, double k_S) {
    if (!(gamma > 0.0)) throw std::invalid_argument("Gaussian decay rate must be > 0");
    validate(ReactionParams{k_S});
    const double x = k_S / (2.0 * std::sqrt(gamma));
    const double ex = scaled_erfc(x);
    GaussianYield out;
    out.printed = 0.5 + std::sqrt(std::numbers::pi * k_S * k_S / (2.0 * gamma)) * ex;
    out.rederived = 0.5 + 0.25 * k_S * std::sqrt(std::numbers::pi / gamma) * ex;
    return out;
}

SmallRateYield yield_small_ks(double lambda, double J, double g, double theta, int N, int cutoff_modes, double k_S) {
    if (N < 2) throw std::invalid_argument("bath size must be >= 2");
    if (cutoff_modes < 1) throw std::invalid_argument("cutoff mode count must be >= 1");
    if (!(g > 0.0)) throw std::invalid_argument("small-k_S form needs g > 0");
    const DerivedCouplings c = couplings_from_lambda(lambda, g, theta);
    if (c.cos_theta == 0.0)
        throw std::domain_error("small-k_S yield is singular at theta = pi/2 (exact yield is 1 there)");
    const double kc3 = std::pow(static_cast<double>(cutoff_modes), 3);
    SmallRateYield out;
    out.phi_s = 0.5 + std::numbers::pi * k_S * std::abs(1.0 - lambda) * std::sqrt(6.0 / (N * kc3)) /
                          (16.0 * J * g * c.cos_theta);
    if (lambda != 1.0) out.validity_ratio = k_S / (2.0 * std::sqrt(gaussian_rate(N, J, c, cutoff_modes)));
    return out;
}

double le_n2(double lambda, double g, double theta, double t) {
    const DerivedCouplings c = couplings_from_lambda(lambda, g, theta);
    const double shift = g * c.cos_theta;
    const double xi = std::sqrt(1.0 + 4.0 * c.lambda_plus * c.lambda_plus);
    const double s = std::sin(xi * t);
    return 1.0 - 16.0 * shift * shift * s * s / ((1.0 + 4.0 * c.lambda_minus * c.lambda_minus) * xi * xi);
}

namespace {

double stencil(const std::function<double(double)>& f, double theta, double h) {
    constexpr double lo = 0.0;
    constexpr double hi = std::numbers::pi / 2;
    if (theta - h < lo) return (-3.0 * f(theta) + 4.0 * f(theta + h) - f(theta + 2.0 * h)) / (2.0 * h);
    if (theta + h > hi) return (3.0 * f(theta) - 4.0 * f(theta - h) + f(theta - 2.0 * h)) / (2.0 * h);
    return (f(theta + h) - f(theta - h)) / (2.0 * h);
}

}  // namespace

SensitivityResult sensitivity(const std::function<double(double)>& yield_of_theta, double theta, double fd_step) {
    if (!(fd_step > 0.0 && fd_step < 0.25)) throw std::invalid_argument("fd_step must lie in (0, 0.25)");
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) throw std::invalid_argument("theta must lie in [0, pi/2]");
    SensitivityResult out;
    out.theta = theta;
    out.fd_step = fd_step;
    out.lambda_theta = stencil(yield_of_theta, theta, fd_step);
    out.estimated_error = std::abs(out.lambda_theta - stencil(yield_of_theta, theta, 0.5 * fd_step));
    return out;
}

}  // namespace compass
