#pragma once

// Dense exact-diagonalization reference for short Ising chains (N <= 12).
//
// Basis states are z-basis bit strings, little-endian: bit j of the index is
// spin j, with bit value 0 meaning sigma^z = +1. Operators use Pauli
// normalization.

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "compass/model.hpp"

namespace compass::ed {

inline constexpr int kMaxSpins = 12;

// `twisted` keeps the periodic Hamiltonian on the +1 parity sector and
// reverses the boundary bond on the -1 sector. Both sectors then map to
// antiperiodic fermion momenta, so this is the exact spin-language image of
// the mode-pair product space used by the free-fermion thermal echo.
enum class Boundary { periodic, open, twisted };

[[nodiscard]] const char* to_string(Boundary b) noexcept;

struct SpinHamiltonian {
    int N = 0;
    Boundary boundary = Boundary::periodic;
    Eigen::MatrixXd matrix;
};

/// zz * sum_bonds z_j z_{j+1} + transverse * sum_j x_j.
[[nodiscard]] SpinHamiltonian build_ising_hamiltonian(int N, double zz, double transverse, Boundary boundary);

/// J sum[z_j z_{j+1} + field x_j], the bath Hamiltonian at transverse field
/// `field`. Throws std::invalid_argument for N outside [2, 12].
[[nodiscard]] SpinHamiltonian build_spin_hamiltonian(int N, double J, double field, Boundary boundary);

/// prod_j x_j applied to a state (flips every bit).
[[nodiscard]] Eigen::VectorXd apply_parity(const Eigen::VectorXd& v);
[[nodiscard]] double parity_expectation(const Eigen::VectorXd& v);

struct GroundState {
    double energy = 0.0;
    Eigen::VectorXd vector;
};

/// Lowest eigenpair. Within a degenerate ground manifold the +1 parity
/// representative is returned.
[[nodiscard]] GroundState ground_state(const SpinHamiltonian& h);

/// exp(-H/T)/Z. Throws std::invalid_argument for T <= 0.
[[nodiscard]] Eigen::MatrixXd thermal_state(const SpinHamiltonian& h, double T);

/// Prepared echo evaluator: both branch propagators diagonalized once, after
/// which each time point costs O(4^N).
class EchoContext {
public:
    /// Initial state is the ground state (T = 0) or thermal state of h_prep.
    EchoContext(const SpinHamiltonian& h_plus, const SpinHamiltonian& h_minus, const SpinHamiltonian& h_prep,
                double T);

    /// tr[U+ rho (U-)^dagger].
    [[nodiscard]] std::complex<double> trace_factor(double t) const;
    [[nodiscard]] double echo(double t) const { return std::norm(trace_factor(t)); }

private:
    Eigen::VectorXd e_plus_;
    Eigen::VectorXd e_minus_;
    Eigen::MatrixXd kernel_;  // O_{m'm} A_{mm'} in the branch eigenbases
};

/// Echo context for the bath at the given couplings; the preparation field
/// defaults to couplings.lambda.
[[nodiscard]] EchoContext make_echo_context(int N, double J, const DerivedCouplings& couplings, double T,
                                            Boundary boundary, std::optional<double> preparation_field = std::nullopt);

[[nodiscard]] double echo_ed(int N, double J, const DerivedCouplings& couplings, double T, double t,
                             Boundary boundary = Boundary::periodic);

[[nodiscard]] std::complex<double> echo_ed_trace(int N, double J, const DerivedCouplings& couplings, double T,
                                                 double t, Boundary boundary = Boundary::periodic);

}  // namespace compass::ed
