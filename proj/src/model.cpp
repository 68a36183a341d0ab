#include "compass/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace compass {

namespace {

// cos(pi/2) evaluates to 6e-17 in double; pin the endpoint so that a field
// along the chain axis gives exactly equal branch Hamiltonians.
double exact_cos(double theta) {
    if (theta == std::numbers::pi / 2) return 0.0;
    return std::cos(theta);
}

}  // namespace

void validate(const FieldConfig& field) {
    if (!(field.B >= 0.0)) throw std::invalid_argument("field magnitude B must be >= 0, got " + std::to_string(field.B));
    if (!(field.theta >= 0.0 && field.theta <= std::numbers::pi / 2))
        throw std::invalid_argument("theta must lie in [0, pi/2], got " + std::to_string(field.theta));
    if (!(field.nuclear_moment > 0.0)) throw std::invalid_argument("nuclear_moment must be > 0");
    if (!(field.omega >= 0.0)) throw std::invalid_argument("omega must be >= 0");
}

void validate(const EnvironmentParams& env) {
    if (env.N < 2) throw std::invalid_argument("bath size N must be >= 2, got " + std::to_string(env.N));
    if (!(env.J > 0.0)) throw std::invalid_argument("Ising coupling J must be > 0 (antiferromagnetic)");
    if (!std::isfinite(env.g0)) throw std::invalid_argument("g0 must be finite");
}

void validate(const ReactionParams& reaction) {
    if (!(reaction.k_S > 0.0) || !std::isfinite(reaction.k_S))
        throw std::invalid_argument("recombination rate k_S must be > 0");
}

void validate(const ThermalParams& thermal) {
    if (!(thermal.T >= 0.0) || !std::isfinite(thermal.T)) throw std::invalid_argument("temperature T must be >= 0");
}

DerivedCouplings derive_couplings(const FieldConfig& field, const EnvironmentParams& env) {
    validate(field);
    validate(env);
    const double c = exact_cos(field.theta);
    DerivedCouplings out;
    out.cos_theta = c;
    out.lambda = field.nuclear_moment * field.B * c / env.J;
    out.g = env.g0 / std::sqrt(static_cast<double>(env.N));
    const double shift = out.g * c;
    out.lambda_plus = out.lambda + shift;
    out.lambda_minus = out.lambda - shift;
    return out;
}

DerivedCouplings couplings_from_lambda(double lambda, double g, double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2))
        throw std::invalid_argument("theta must lie in [0, pi/2]");
    const double c = exact_cos(theta);
    DerivedCouplings out;
    out.cos_theta = c;
    out.lambda = lambda;
    out.g = g;
    out.lambda_plus = lambda + g * c;
    out.lambda_minus = lambda - g * c;
    return out;
}

}  // namespace compass
