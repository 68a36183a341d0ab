#pragma once

// Singlet product yield from an echo series, its closed-form approximations,
// and the directional sensitivity Lambda(theta) = dPhi_S/dtheta.
//
// With identical baths the singlet population is f_S(t) = [1 + L(t)]/2 and an
// exponential re-encounter distribution k_S exp(-k_S t) gives
//
//     Phi_S = 1/2 + (k_S/2) int_0^inf L(t) exp(-k_S t) dt.

#include <cstddef>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>

#include "compass/ed_oracle.hpp"
#include "compass/fermion_echo.hpp"

namespace compass {

struct QuadratureConfig {
    double rel_tol = 1e-6;
    double truncation_eps = 1e-9;  // t_max = ln(1/eps) / k_S
    double min_points_per_period = 20.0;
    int max_refinements = 14;
};

void validate(const QuadratureConfig& cfg);

struct YieldResult {
    double phi_s = 0.0;
    double truncation_time = 0.0;
    double estimated_error = 0.0;
    std::size_t n_evaluations = 0;
};

/// Samples L(t) on uniform grids. `max_frequency` is (1/pi) times the largest
/// angular frequency of the underlying modes and fixes the base step.
struct EchoProvider {
    std::function<void(double t0, double dt, std::span<double> out)> sample;
    double max_frequency = 0.0;
};

[[nodiscard]] EchoProvider make_provider(const EchoContext& ctx);
[[nodiscard]] EchoProvider make_provider(const ed::EchoContext& ctx, double max_frequency);
[[nodiscard]] EchoProvider make_provider(std::function<double(double)> echo, double max_frequency);

/// (1/pi) max_k eps_k(lambda+) over the antiperiodic momenta of an N-ring;
/// for odd N the band-edge bound 2J(1 + |lambda+|)/pi.
[[nodiscard]] double quadrature_frequency(int N, double J, const DerivedCouplings& couplings);

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double previous, double last)
        : std::runtime_error(what), previous_(previous), last_(last) {}
    [[nodiscard]] double previous() const noexcept { return previous_; }
    [[nodiscard]] double last() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

/// f_S = (1 + L)/2. Throws for L outside [0, 1] (1e-12 slack).
[[nodiscard]] double singlet_population(double echo);

/// f_S = (1 + Re D)/2 for distinct baths. Throws for |D| > 1 (1e-12 slack).
[[nodiscard]] double singlet_population(std::complex<double> decoherence);

/// Trapezoid rule on [0, t_max] with step halving and Richardson
/// extrapolation, stopping once a halving moves the trapezoid estimate by less
/// than rel_tol * Phi_S. The certified truncation tail exp(-k_S t_max)/2 is
/// part of estimated_error. Throws QuadratureError on non-convergence.
[[nodiscard]] YieldResult product_yield(const EchoProvider& echo, double k_S, const QuadratureConfig& cfg = {});

struct GaussianYield {
    double printed = 0.0;    // 1/2 + exp(k^2/4g) sqrt(pi k^2/(2g)) [1 - erf(k/(2 sqrt g))]
    double rederived = 0.0;  // 1/2 + (k/4) sqrt(pi/g) exp(k^2/4g) erfc(k/(2 sqrt g))
    /// (printed - 1/2) / (rederived - 1/2); constant 2 sqrt(2).
    [[nodiscard]] double prefactor_ratio() const { return (printed - 0.5) / (rederived - 0.5); }
};

/// Yield for a Gaussian echo exp(-gamma t^2). The printed closed form and the
/// one obtained by integrating the Gaussian directly differ by a constant
/// prefactor; both are returned. Throws for gamma <= 0.
[[nodiscard]] GaussianYield yield_gaussian(double gamma, double k_S);

/// exp(x^2) erfc(x), stable for large x.
[[nodiscard]] double scaled_erfc(double x);

struct SmallRateYield {
    double phi_s = 0.0;
    double validity_ratio = 0.0;  // k_S / (2 sqrt(gamma)); the form needs << 1
};

/// Phi_S ~ 1/2 + pi k_S |1 - lambda| sqrt(6/(N K_c^3)) / (16 J g cos(theta)).
/// Throws std::domain_error when cos(theta) = 0 (the exact answer is then 1).
[[nodiscard]] SmallRateYield yield_small_ks(double lambda, double J, double g, double theta, int N, int cutoff_modes,
                                            double k_S);

/// Closed-form echo of a single Ising bond,
/// 1 - 16 g^2 cos^2 sin^2(xi t) / ([1 + 4(lambda - g cos)^2] xi^2),
/// xi = sqrt(1 + 4(lambda + g cos)^2), in units J = 1. It is the echo of the
/// open N = 2 chain prepared in the ground state of H(lambda-).
[[nodiscard]] double le_n2(double lambda, double g, double theta, double t);

struct SensitivityResult {
    double theta = 0.0;
    double lambda_theta = 0.0;
    double fd_step = 0.0;
    double estimated_error = 0.0;  // |Lambda(h) - Lambda(h/2)|
};

inline constexpr double kDefaultFdStep = 1e-3;

/// dPhi/dtheta by second-order finite differences: central in the interior,
/// one-sided three-point at the ends of [0, pi/2].
[[nodiscard]] SensitivityResult sensitivity(const std::function<double(double)>& yield_of_theta, double theta,
                                            double fd_step = kDefaultFdStep);

}  // namespace compass
