#pragma once

// Physical parameters of the radical-pair compass and the reduction of a
// field configuration to the effective transverse fields seen by each bath.
//
// Units: J = 1 sets the energy scale, hbar = k_B = 1, so times are in 1/J and
// temperatures in J. With nuclear_moment = 1, B is numerically the transverse
// field at theta = 0.

#include <numbers>

namespace compass {

struct FieldConfig {
    double B = 0.0;               // field magnitude, g_N mu_N B in units of J
    double theta = 0.0;           // angle to the chain's transverse axis, [0, pi/2]
    double nuclear_moment = 1.0;  // g_N mu_N
    // Electron Zeeman splitting. Only enters H^± as a constant ±omega, which
    // is a global phase of each evolution operator and drops out of |D(t)|.
    double omega = 0.0;
};

struct EnvironmentParams {
    int N = 2;        // nuclear spins per bath
    double J = 1.0;   // antiferromagnetic Ising coupling, J > 0
    double g0 = 1.0;  // bare electron-nucleus coupling; g = g0 / sqrt(N)
};

struct DerivedCouplings {
    double lambda = 0.0;        // B cos(theta) nuclear_moment / J
    double g = 0.0;             // g0 / sqrt(N)
    double lambda_plus = 0.0;   // lambda + g cos(theta)
    double lambda_minus = 0.0;  // lambda - g cos(theta)
    double cos_theta = 1.0;

    /// lambda_plus - lambda_minus, i.e. 2 g cos(theta).
    [[nodiscard]] double splitting() const noexcept { return lambda_plus - lambda_minus; }
};

struct ReactionParams {
    double k_S = 0.1;  // singlet recombination rate, units of J
};

struct ThermalParams {
    double T = 0.0;  // T = 0 selects the pure ground state
};

void validate(const FieldConfig& field);
void validate(const EnvironmentParams& env);
void validate(const ReactionParams& reaction);
void validate(const ThermalParams& thermal);

/// Effective fields of the two bath Hamiltonians H^± conditioned on the
/// electron branch. Throws std::invalid_argument on out-of-domain input.
[[nodiscard]] DerivedCouplings derive_couplings(const FieldConfig& field, const EnvironmentParams& env);

/// Couplings from an explicit transverse field, bypassing the field geometry.
/// Used where lambda itself is the swept quantity.
[[nodiscard]] DerivedCouplings couplings_from_lambda(double lambda, double g, double theta);

}  // namespace compass
