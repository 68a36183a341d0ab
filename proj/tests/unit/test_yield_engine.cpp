#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "compass/ed_oracle.hpp"
#include "compass/fermion_echo.hpp"
#include "compass/yield_engine.hpp"
#include "oracles.hpp"

using namespace compass;

TEST_CASE("singlet population") {
    CHECK(singlet_population(1.0) == 1.0);
    CHECK(singlet_population(0.0) == 0.5);
    CHECK(singlet_population(std::complex<double>(-1.0, 0.0)) == 0.0);
    CHECK(singlet_population(std::complex<double>(0.0, 0.8)) == 0.5);
    CHECK_THROWS_AS((void)singlet_population(1.1), std::invalid_argument);
    CHECK_THROWS_AS((void)singlet_population(-0.2), std::invalid_argument);
    CHECK_THROWS_AS((void)singlet_population(std::complex<double>(0.8, 0.8)), std::invalid_argument);
}

TEST_CASE("no decoherence gives unit yield") {
    const YieldResult y = product_yield(make_provider([](double) { return 1.0; }, 0.0), 0.1);
    CHECK(std::abs(y.phi_s - 1.0) < 1e-9);
    CHECK(y.estimated_error >= 0.5e-9);
    CHECK(y.truncation_time == doctest::Approx(std::log(1e9) / 0.1));
    CHECK(y.n_evaluations > 0);
}

TEST_CASE("exponential echo matches the Laplace transform") {
    for (double a : {0.05, 0.3, 2.0}) {
        for (double k : {0.01, 0.1, 1.0}) {
            const YieldResult y = product_yield(make_provider([a](double t) { return std::exp(-a * t); }, 0.0), k);
            CHECK(y.phi_s == doctest::Approx(0.5 + k / (2.0 * (k + a))).epsilon(1e-7));
        }
    }
}

TEST_CASE("Gaussian echo matches the independently integrated value") {
    for (double gamma : {0.1, 1.0, 10.0}) {
        for (double k : {0.05, 0.1, 0.5}) {
            const YieldResult y =
                product_yield(make_provider([gamma](double t) { return std::exp(-gamma * t * t); }, 0.0), k);
            const double reference = 0.5 + 0.5 * k * static_cast<double>(testing::gaussian_laplace_integral(gamma, k));
            CHECK(std::abs(y.phi_s - reference) < 1e-6 * reference);
            CHECK(yield_gaussian(gamma, k).rederived == doctest::Approx(reference).epsilon(1e-13));
        }
    }
}

TEST_CASE("an isolated spike at t = 0 carries no weight") {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-3;
    cfg.max_refinements = 20;
    const YieldResult y = product_yield(make_provider([](double t) { return t == 0.0 ? 1.0 : 0.0; }, 0.0), 0.1, cfg);
    CHECK(std::abs(y.phi_s - 0.5) < 2e-3);
}

TEST_CASE("non-convergence reports the last two estimates") {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-14;
    cfg.max_refinements = 2;
    cfg.min_points_per_period = 4;
    const auto provider = make_provider([](double t) { return 0.5 + 0.5 * std::cos(3.0 * t); }, 0.1);
    try {
        (void)product_yield(provider, 0.1, cfg);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(std::isfinite(e.previous()));
        CHECK(std::isfinite(e.last()));
        CHECK(e.previous() != e.last());
    }
}

TEST_CASE("invalid quadrature input") {
    const auto provider = make_provider([](double) { return 1.0; }, 0.0);
    CHECK_THROWS_AS((void)product_yield(provider, 0.0), std::invalid_argument);
    QuadratureConfig cfg;
    cfg.min_points_per_period = 2.0;
    CHECK_THROWS_AS((void)product_yield(provider, 0.1, cfg), std::invalid_argument);
    CHECK_THROWS_AS((void)product_yield(EchoProvider{}, 0.1), std::invalid_argument);
}

TEST_CASE("yield of a real bath lies in [1/2, 1]") {
    for (double lambda : {0.5, 0.95, 1.0, 1.3}) {
        for (double T : {0.0, 0.1, 1.0}) {
            const auto c = couplings_from_lambda(lambda, 1.0 / std::sqrt(200.0), 0.2);
            const EchoContext ctx(200, 1.0, c, T);
            for (double k : {0.02, 0.1, 0.5, 2.0}) {
                const double phi = product_yield(make_provider(ctx), k).phi_s;
                CHECK(phi >= 0.5 - 1e-9);
                CHECK(phi <= 1.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("yield grows with k_S for non-increasing echoes") {
    const std::vector<std::function<double(double)>> echoes = {
        [](double t) { return std::exp(-0.2 * t); },
        [](double t) { return std::exp(-3.0 * t * t); },
        [](double t) { return 1.0 / (1.0 + t * t); },
        [](double t) { return 0.3 + 0.7 * std::exp(-t); },
        [](double t) { return t < 2.0 ? 1.0 - 0.4 * t : 0.2; },
    };
    for (const auto& echo : echoes) {
        double previous = 0.5;
        for (double k : {0.01, 0.05, 0.1, 0.5, 2.0}) {
            const double phi = product_yield(make_provider(echo, 1.0), k).phi_s;
            CHECK(phi > previous);
            previous = phi;
        }
    }
}

TEST_CASE("fermion and ED providers give the same yield") {
    const auto c = couplings_from_lambda(0.9, 1.0 / std::sqrt(6.0), 0.0);
    const EchoContext fermion(6, 1.0, c);
    const auto exact = ed::make_echo_context(6, 1.0, c, 0.0, ed::Boundary::periodic);
    const double f = quadrature_frequency(6, 1.0, c);
    CHECK(f == doctest::Approx(fermion.max_frequency()));
    const double a = product_yield(make_provider(fermion), 0.1).phi_s;
    const double b = product_yield(make_provider(exact, f), 0.1).phi_s;
    CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("printed and integrated Gaussian forms differ by 2 sqrt 2") {
    for (double gamma : {0.3, 1.0, 50.0}) {
        for (double k : {0.01, 0.1, 1.0}) {
            const GaussianYield y = yield_gaussian(gamma, k);
            CHECK(y.prefactor_ratio() == doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-12));
            const double x = k / (2.0 * std::sqrt(gamma));
            const double printed = 0.5 + std::exp(x * x) * std::sqrt(std::numbers::pi * k * k / (2.0 * gamma)) *
                                             (1.0 - std::erf(x));
            CHECK(y.printed == doctest::Approx(printed).epsilon(1e-12));
        }
    }
    CHECK(yield_gaussian(1.0, 1e-9).printed == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(yield_gaussian(1e12, 0.1).printed == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS_AS((void)yield_gaussian(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)yield_gaussian(-1.0, 0.1), std::invalid_argument);
}

TEST_CASE("scaled complementary error function") {
    for (double x : {0.0, 0.5, 3.0, 20.0}) CHECK(scaled_erfc(x) == doctest::Approx(std::exp(x * x) * std::erfc(x)));
    // Continuity across the asymptotic switch.
    CHECK(scaled_erfc(25.0) == doctest::Approx(scaled_erfc(24.999999)).epsilon(1e-6));
    CHECK(scaled_erfc(1e4) == doctest::Approx(1.0 / (1e4 * std::sqrt(std::numbers::pi))).epsilon(1e-8));
}

TEST_CASE("small-k_S form") {
    const double g = 1.0 / std::sqrt(1000.0);
    CHECK(yield_small_ks(1.0, 1.0, g, 0.0, 1000, 3, 0.01).phi_s == 0.5);
    const double left = yield_small_ks(0.9, 1.0, g, 0.0, 1000, 3, 0.01).phi_s;
    const double right = yield_small_ks(1.1, 1.0, g, 0.0, 1000, 3, 0.01).phi_s;
    CHECK(left == doctest::Approx(right).epsilon(1e-14));
    const double doubled = yield_small_ks(0.9, 1.0, g, 0.0, 1000, 3, 0.02).phi_s;
    CHECK(doubled - 0.5 == doctest::Approx(2.0 * (left - 0.5)).epsilon(1e-14));
    const double expected = 0.5 + std::numbers::pi * 0.01 * 0.1 * std::sqrt(6.0 / (1000.0 * 27.0)) / (16.0 * g);
    CHECK(left == doctest::Approx(expected).epsilon(1e-14));
    const auto r = yield_small_ks(0.9, 1.0, g, 0.0, 1000, 3, 0.01);
    CHECK(r.validity_ratio > 0.0);
    CHECK(r.validity_ratio < 1e-3);
    CHECK_THROWS_AS((void)yield_small_ks(0.9, 1.0, g, std::numbers::pi / 2, 1000, 3, 0.01), std::domain_error);
}

TEST_CASE("single-bond closed form") {
    CHECK(le_n2(0.5, 0.1, 0.0, 0.0) == 1.0);
    for (double t : {0.3, 2.0, 9.0}) CHECK(le_n2(0.5, 0.3, std::numbers::pi / 2, t) == 1.0);

    for (double lambda : {0.5, 1.0, 1.5}) {
        for (double g : {0.05, 0.1}) {
            const auto c = couplings_from_lambda(lambda, g, 0.0);
            const auto exact = ed::make_echo_context(2, 1.0, c, 0.0, ed::Boundary::open, c.lambda_minus);
            for (double t = 0.0; t <= 10.0; t += 0.05) CHECK(std::abs(exact.echo(t) - le_n2(lambda, g, 0.0, t)) < 1e-10);
        }
    }
}

TEST_CASE("single-bond closed form stays in [0, 1] over a parameter lattice") {
    for (double lambda = 0.0; lambda <= 3.0; lambda += 0.25) {
        for (double g : {0.01, 0.3, 1.0, 3.0, 10.0}) {
            for (double theta = 0.0; theta <= 1.5; theta += 0.3) {
                for (double t = 0.0; t <= 20.0; t += 0.37) {
                    const double L = le_n2(lambda, g, theta, t);
                    CHECK(L >= -1e-12);
                    CHECK(L <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("finite-difference sensitivity") {
    CHECK(sensitivity([](double) { return 0.7; }, 0.4).lambda_theta == 0.0);
    const auto s = sensitivity([](double th) { return std::cos(th); }, std::numbers::pi / 4);
    CHECK(s.lambda_theta == doctest::Approx(-std::numbers::sqrt2 / 2).epsilon(1e-6));
    CHECK(s.estimated_error < 1e-6);
    CHECK(s.fd_step == kDefaultFdStep);
    // One-sided stencils at the ends of [0, pi/2].
    CHECK(sensitivity([](double th) { return std::sin(th); }, 0.0).lambda_theta == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sensitivity([](double th) { return std::cos(th); }, std::numbers::pi / 2).lambda_theta ==
          doctest::Approx(-1.0).epsilon(1e-6));
    CHECK_THROWS_AS((void)sensitivity([](double th) { return th; }, 2.0), std::invalid_argument);
    CHECK_THROWS_AS((void)sensitivity([](double th) { return th; }, 0.3, 0.0), std::invalid_argument);
}

TEST_CASE("sensitivity vanishes at theta = 0 for a real bath") {
    const int N = 100;
    const EnvironmentParams env{N, 1.0, 1.0};
    const double f = quadrature_frequency(N, 1.0, derive_couplings(FieldConfig{0.9, 0.0}, env));
    auto yield_of_theta = [&](double theta) {
        const EchoContext ctx(N, 1.0, derive_couplings(FieldConfig{0.9, theta}, env), 0.01);
        EchoProvider p = make_provider(ctx);
        p.max_frequency = f;
        return product_yield(p, 0.1).phi_s;
    };
    const SensitivityResult s = sensitivity(yield_of_theta, 0.0);
    CHECK(std::abs(s.lambda_theta) < 10.0 * s.fd_step * s.fd_step);
}
