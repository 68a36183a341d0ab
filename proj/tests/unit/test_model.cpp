#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "compass/model.hpp"

using namespace compass;

TEST_CASE("derived couplings follow the field geometry") {
    const FieldConfig field{0.9, std::numbers::pi / 3, 1.0, 0.0};
    const EnvironmentParams env{1000, 1.0, 1.0};
    const DerivedCouplings c = derive_couplings(field, env);
    const double cos_theta = std::cos(std::numbers::pi / 3);
    const double g = 1.0 / std::sqrt(1000.0);
    CHECK(c.lambda == doctest::Approx(0.9 * cos_theta).epsilon(1e-15));
    CHECK(c.g == doctest::Approx(g).epsilon(1e-15));
    CHECK(c.lambda_plus == doctest::Approx(0.9 * cos_theta + g * cos_theta).epsilon(1e-15));
    CHECK(c.lambda_minus == doctest::Approx(0.9 * cos_theta - g * cos_theta).epsilon(1e-15));
    CHECK(c.splitting() == doctest::Approx(2.0 * g * cos_theta).epsilon(1e-14));
}

TEST_CASE("J and the nuclear moment rescale lambda") {
    const DerivedCouplings c = derive_couplings(FieldConfig{1.0, 0.0, 2.0, 0.0}, EnvironmentParams{4, 0.5, 1.0});
    CHECK(c.lambda == doctest::Approx(4.0));
    CHECK(c.g == doctest::Approx(0.5));
}

TEST_CASE("field along the chain axis decouples the branches exactly") {
    const DerivedCouplings c =
        derive_couplings(FieldConfig{1.3, std::numbers::pi / 2, 1.0, 0.0}, EnvironmentParams{10, 1.0, 1.0});
    CHECK(c.cos_theta == 0.0);
    CHECK(c.lambda == 0.0);
    CHECK(c.lambda_plus == c.lambda_minus);
}

TEST_CASE("zero coupling gives identical branches") {
    const DerivedCouplings c = derive_couplings(FieldConfig{0.7, 0.2, 1.0, 0.0}, EnvironmentParams{8, 1.0, 0.0});
    CHECK(c.lambda_plus == c.lambda_minus);
}

TEST_CASE("couplings from an explicit lambda") {
    const DerivedCouplings c = couplings_from_lambda(0.95, 0.1, 0.0);
    CHECK(c.lambda == 0.95);
    CHECK(c.lambda_plus == doctest::Approx(1.05));
    CHECK(c.lambda_minus == doctest::Approx(0.85));
    CHECK_THROWS_AS((void)couplings_from_lambda(0.9, 0.1, 2.0), std::invalid_argument);
}

TEST_CASE("out-of-domain parameters are rejected") {
    const EnvironmentParams env{4, 1.0, 1.0};
    CHECK_THROWS_AS((void)derive_couplings(FieldConfig{-0.1, 0.0, 1.0, 0.0}, env), std::invalid_argument);
    CHECK_THROWS_AS((void)derive_couplings(FieldConfig{0.5, -0.01, 1.0, 0.0}, env), std::invalid_argument);
    CHECK_THROWS_AS((void)derive_couplings(FieldConfig{0.5, 1.6, 1.0, 0.0}, env), std::invalid_argument);
    CHECK_THROWS_AS((void)derive_couplings(FieldConfig{0.5, 0.0, 0.0, 0.0}, env), std::invalid_argument);
    CHECK_THROWS_AS((void)derive_couplings(FieldConfig{0.5, 0.0}, EnvironmentParams{1, 1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)derive_couplings(FieldConfig{0.5, 0.0}, EnvironmentParams{4, -1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(ReactionParams{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ThermalParams{-0.1}), std::invalid_argument);
    CHECK_NOTHROW(validate(ThermalParams{0.0}));
}
