#pragma once

// Loschmidt echo of a periodic transverse-field Ising ring by momentum-mode
// factorization.
//
// The antiferromagnetic chain J sum[z_j z_{j+1} + l x_j] (N even) is mapped
// by the sublattice rotation z_j -> (-1)^j z_j followed by a pi rotation about
// z onto the ferromagnetic form -J sum[z_j z_{j+1} + l x_j]. After the
// Jordan-Wigner transform the even-parity sector splits into independent
// pairs (k, -k) with k = (2j-1) pi / N. Each pair spans four states: the
// even block {vacuum, c+_k c+_-k vacuum} and two singly occupied levels.
//
// Mode blocks are stored in the gauge where the pair state carries a factor
// i, which makes every even block real symmetric:
//
//     [[ 0,          2J sin k          ],
//      [ 2J sin k,   4J (l - cos k)    ]]      odd levels: 2J (l - cos k)
//
// The spin Hamiltonian is traceless, so the per-mode centers 2J(l - cos k)
// summed over modes cancel its constant offset exactly. Trace factors are
// therefore evaluated with centered blocks and carry no extra phase; they
// agree with the literal spin-chain traces including the phase.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "compass/model.hpp"

namespace compass {

struct ModeGrid {
    int N = 0;
    std::vector<double> momenta;  // (2j-1) pi / N, j = 1..N/2
};

/// Throws std::invalid_argument for odd N or N < 2.
[[nodiscard]] ModeGrid build_mode_grid(int N);

/// Real symmetric 2x2 block [[a, b], [b, d]].
struct Block2 {
    double a = 0.0;
    double b = 0.0;
    double d = 0.0;

    [[nodiscard]] double center() const noexcept { return 0.5 * (a + d); }
    [[nodiscard]] double half_gap() const noexcept;
    [[nodiscard]] double lower() const noexcept { return center() - half_gap(); }
    [[nodiscard]] double upper() const noexcept { return center() + half_gap(); }
};

struct ModeBlock {
    double k = 0.0;
    Block2 h_plus;
    Block2 h_minus;
    Block2 h_init;
    double a_plus = 0.0;   // odd-subspace level of H(lambda+)
    double a_minus = 0.0;  // odd-subspace level of H(lambda-)
};

/// eps_k(l) = 2J sqrt(1 + l^2 - 2 l cos k).
[[nodiscard]] double mode_energy(double k, double field, double J);

[[nodiscard]] Block2 even_block(double k, double field, double J);

/// Requires k in (0, pi).
[[nodiscard]] ModeBlock build_mode_block(double k, const DerivedCouplings& couplings, double J);

/// Complex number as log-magnitude and phase, so long mode products survive
/// underflow.
struct LogPolar {
    double log_abs = 0.0;
    double arg = 0.0;

    [[nodiscard]] std::complex<double> value() const;
};

/// Immutable per-parameter-point state: mode frequencies and the projections
/// of the initial state on the branch axes. Safe to share across threads.
class EchoContext {
public:
    /// T = 0 prepares the ground state of H(lambda); T > 0 the per-mode
    /// canonical state. The preparation field defaults to couplings.lambda.
    EchoContext(int N, double J, const DerivedCouplings& couplings, double T = 0.0,
                std::optional<double> preparation_field = std::nullopt);

    [[nodiscard]] int size() const noexcept { return N_; }
    [[nodiscard]] std::size_t mode_count() const noexcept { return eps_plus_.size(); }
    [[nodiscard]] double temperature() const noexcept { return T_; }

    /// Per-mode factors tr_k[U+ rho_k (U-)^dagger]; each has modulus <= 1.
    [[nodiscard]] std::vector<std::complex<double>> mode_factors(double t) const;

    /// tr[U+ rho (U-)^dagger] for the whole ring.
    [[nodiscard]] LogPolar trace_factor(double t) const;

    [[nodiscard]] double log_echo(double t) const;
    [[nodiscard]] double echo(double t) const;

    /// L at t0 + i dt for i in [0, out.size()). Trigonometric factors are
    /// advanced by rotation and reseeded exactly every kReseedInterval steps;
    /// agrees with echo() to ~1e-13.
    void echo_uniform(double t0, double dt, std::span<double> out) const;

    /// (1/pi) max_k eps_k(lambda+): the sampling scale for quadrature.
    [[nodiscard]] double max_frequency() const noexcept { return max_frequency_; }

    static constexpr std::size_t kReseedInterval = 64;

private:
    int N_;
    double T_;
    std::vector<double> eps_plus_;
    std::vector<double> eps_minus_;
    // Factor_k(t) = s C-C+ + q S-S+ + w + i (u S-C+ - v C-S+) with
    // C = cos(eps t), S = sin(eps t).
    std::vector<double> s_;
    std::vector<double> q_;
    std::vector<double> w_;
    std::vector<double> u_;
    std::vector<double> v_;
    double max_frequency_ = 0.0;
};

struct EchoSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::optional<std::vector<std::complex<double>>> d_values;
};

/// L(t) from the ground state of H(lambda). Throws for odd N.
[[nodiscard]] double echo_pure(int N, double J, const DerivedCouplings& couplings, double t);

/// L(t) from the per-mode thermal state at temperature T > 0.
[[nodiscard]] double echo_thermal(int N, double J, const DerivedCouplings& couplings, double T, double t);

/// Trace factor z(t) = tr[U+ rho (U-)^dagger] for one environment.
[[nodiscard]] std::complex<double> echo_trace_factor(int N, double J, const DerivedCouplings& couplings, double T,
                                                     double t);

/// Requires times increasing and starting at 0.
[[nodiscard]] EchoSeries echo_series(int N, double J, const DerivedCouplings& couplings, double T,
                                     std::span<const double> times);

struct TraceSeries {
    std::vector<double> times;
    std::vector<std::complex<double>> z;
};

[[nodiscard]] TraceSeries trace_series(const EchoContext& ctx, std::span<const double> times);

/// D(t) = z1(t) conj(z2(t)); equal to L(t) = |z|^2 for identical baths.
/// Throws std::invalid_argument when the time grids differ.
[[nodiscard]] std::vector<std::complex<double>> decoherence_factor(const TraceSeries& env1, const TraceSeries& env2);

/// Echo series of two distinct baths: values = |D(t)|, d_values = D(t).
[[nodiscard]] EchoSeries pair_echo_series(const EchoContext& env1, const EchoContext& env2,
                                          std::span<const double> times);

// Result of calibrate_cutoff at N = 1000, lambda = 0.9, theta = 0, g0 = 1.
// No integer cutoff brings gamma within a factor 2 of the fitted decay there;
// K_c = 1 is the closest (gamma / c ~ 23).
inline constexpr int kDefaultCutoffModes = 1;

/// Short-time Gaussian decay rate near criticality,
/// gamma = 8 J^2 g^2 N K_c^3 cos^2(theta) / (3 pi (1 - lambda)^2).
/// Throws std::domain_error at lambda = 1.
[[nodiscard]] double gaussian_rate(int N, double J, const DerivedCouplings& couplings,
                                   int cutoff_modes = kDefaultCutoffModes);

struct GaussianFit {
    double rate = 0.0;          // c in ln L ~ -c t^2
    double rel_residual = 0.0;  // rms residual / rms |ln L| over the window
    double window_end = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit of ln L = -c t^2 over the early-time window ending where
/// L first falls to `floor` (or at the first local minimum, whichever comes
/// first). The quadratic form only holds while L stays near one; by L ~ 0.2
/// the relative residual exceeds 15% at N = 1000.
[[nodiscard]] GaussianFit fit_gaussian_decay(const EchoSeries& series, double floor = 0.7);

/// Integer cutoff whose gaussian_rate is closest (in log ratio) to the fitted
/// decay of the exact echo at the given point.
struct CutoffCalibration {
    int cutoff_modes = 0;
    double fitted_rate = 0.0;
    double predicted_rate = 0.0;
};

[[nodiscard]] CutoffCalibration calibrate_cutoff(int N, double J, const DerivedCouplings& couplings,
                                                 int max_cutoff = 10);

}  // namespace compass
