#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "compass/ed_oracle.hpp"
#include "compass/fermion_echo.hpp"

using namespace compass;

namespace {

DerivedCouplings ring_couplings(int N, double lambda, double theta, double g0 = 1.0) {
    return couplings_from_lambda(lambda, g0 / std::sqrt(static_cast<double>(N)), theta);
}

}  // namespace

TEST_CASE("antiperiodic momentum grid") {
    const ModeGrid grid = build_mode_grid(4);
    REQUIRE(grid.momenta.size() == 2);
    CHECK(grid.momenta[0] == doctest::Approx(std::numbers::pi / 4));
    CHECK(grid.momenta[1] == doctest::Approx(3 * std::numbers::pi / 4));
    CHECK_THROWS_AS((void)build_mode_grid(5), std::invalid_argument);
    CHECK_THROWS_AS((void)build_mode_grid(0), std::invalid_argument);
}

TEST_CASE("even block half-gap is the quasiparticle energy") {
    for (double k : {0.2, 1.1, 2.9}) {
        for (double field : {0.0, 0.6, 1.0, 2.3}) {
            const Block2 b = even_block(k, field, 1.3);
            CHECK(b.half_gap() == doctest::Approx(mode_energy(k, field, 1.3)).epsilon(1e-13));
            CHECK(b.upper() - b.lower() == doctest::Approx(2.0 * b.half_gap()).epsilon(1e-13));
            CHECK(b.center() == doctest::Approx(2.0 * 1.3 * (field - std::cos(k))).epsilon(1e-13));
        }
    }
    CHECK(mode_energy(0.0, 1.0, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)build_mode_block(0.0, couplings_from_lambda(0.5, 0.1, 0.0), 1.0), std::invalid_argument);
}

TEST_CASE("pure-state echo equals exact diagonalization") {
    for (int N : {2, 4, 6, 8}) {
        for (double lambda : {0.5, 1.0, 1.1}) {
            for (double theta : {0.0, std::numbers::pi / 4}) {
                const auto c = ring_couplings(N, lambda, theta);
                const EchoContext fermion(N, 1.0, c);
                const auto exact = ed::make_echo_context(N, 1.0, c, 0.0, ed::Boundary::periodic);
                for (double t = 0.0; t <= 20.0; t += 0.53) {
                    CAPTURE(N);
                    CAPTURE(t);
                    CHECK(std::abs(fermion.echo(t) - exact.echo(t)) < 1e-9);
                    CHECK(std::abs(fermion.trace_factor(t).value() - exact.trace_factor(t)) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("thermal echo equals twisted-boundary exact diagonalization") {
    for (int N : {4, 6}) {
        for (double T : {0.2, 1.0, 5.0}) {
            const auto c = ring_couplings(N, 0.9, 0.3);
            const EchoContext fermion(N, 1.0, c, T);
            const auto exact = ed::make_echo_context(N, 1.0, c, T, ed::Boundary::twisted);
            for (double t = 0.0; t <= 10.0; t += 0.71) CHECK(std::abs(fermion.echo(t) - exact.echo(t)) < 1e-10);
        }
    }
}

TEST_CASE("preparation field other than lambda") {
    const auto c = ring_couplings(6, 0.7, 0.0);
    const EchoContext fermion(6, 1.0, c, 0.0, c.lambda_minus);
    const auto exact = ed::make_echo_context(6, 1.0, c, 0.0, ed::Boundary::periodic, c.lambda_minus);
    for (double t = 0.0; t <= 10.0; t += 0.9) CHECK(std::abs(fermion.echo(t) - exact.echo(t)) < 1e-10);
}

TEST_CASE("uniform sampling agrees with pointwise evaluation") {
    const auto c = ring_couplings(400, 0.95, 0.2);
    for (double T : {0.0, 0.3}) {
        const EchoContext ctx(400, 1.0, c, T);
        std::vector<double> out(1000);
        const double t0 = 3.25, dt = 0.0173;
        ctx.echo_uniform(t0, dt, out);
        double worst = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
            worst = std::max(worst, std::abs(out[i] - ctx.echo(t0 + static_cast<double>(i) * dt)));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("echo is bounded and starts at one") {
    for (int N : {10, 100, 1000}) {
        for (double lambda : {0.0, 0.5, 0.99, 1.0, 1.5}) {
            for (double T : {0.0, 0.2}) {
                const EchoContext ctx(N, 1.0, ring_couplings(N, lambda, 0.4), T);
                CHECK(ctx.echo(0.0) == doctest::Approx(1.0).epsilon(1e-13));
                for (double t = 0.1; t < 40.0; t += 1.3) {
                    const double L = ctx.echo(t);
                    CHECK(L >= 0.0);
                    CHECK(L <= 1.0 + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("long rings stay representable through log magnitude") {
    const EchoContext ctx(20000, 1.0, ring_couplings(20000, 1.0, 0.0, 30.0));
    const double log_l = ctx.log_echo(50.0);
    CHECK(std::isfinite(log_l));
    CHECK(log_l < 0.0);
    CHECK(ctx.echo(50.0) == doctest::Approx(std::exp(log_l)));
}

TEST_CASE("field along the chain axis leaves the echo at one") {
    const EchoContext ctx(50, 1.0, ring_couplings(50, 0.0, std::numbers::pi / 2), 0.1);
    for (double t : {1.0, 7.0, 30.0}) CHECK(ctx.echo(t) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("series helpers") {
    const auto c = ring_couplings(20, 0.9, 0.0);
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
    const EchoSeries s = echo_series(20, 1.0, c, 0.0, times);
    REQUIRE(s.values.size() == 4);
    CHECK(s.values[0] == doctest::Approx(1.0));
    CHECK(s.values[2] == doctest::Approx(echo_pure(20, 1.0, c, 1.0)));
    CHECK(echo_thermal(20, 1.0, c, 0.5, 1.0) == doctest::Approx(std::norm(echo_trace_factor(20, 1.0, c, 0.5, 1.0))));
    CHECK_THROWS_AS((void)echo_thermal(20, 1.0, c, 0.0, 1.0), std::invalid_argument);

    const std::vector<double> late{0.5, 1.0};
    const std::vector<double> unordered{0.0, 1.0, 1.0};
    CHECK_THROWS_AS((void)echo_series(20, 1.0, c, 0.0, late), std::invalid_argument);
    CHECK_THROWS_AS((void)echo_series(20, 1.0, c, 0.0, unordered), std::invalid_argument);
}

TEST_CASE("decoherence factor of identical baths is the echo") {
    const EchoContext ctx(30, 1.0, ring_couplings(30, 0.8, 0.2));
    const std::vector<double> times{0.0, 0.7, 2.2};
    const TraceSeries z = trace_series(ctx, times);
    const auto d = decoherence_factor(z, z);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(d[i].real() == doctest::Approx(ctx.echo(times[i])).epsilon(1e-12));
        CHECK(std::abs(d[i].imag()) < 1e-15);
    }
    const std::vector<double> other{0.0, 0.7, 2.3};
    CHECK_THROWS_AS((void)decoherence_factor(z, trace_series(ctx, other)), std::invalid_argument);
}

TEST_CASE("distinct baths give a complex decoherence factor of modulus at most one") {
    const EchoContext a(30, 1.0, ring_couplings(30, 0.8, 0.2));
    const EchoContext b(40, 1.0, ring_couplings(40, 1.2, 0.2), 0.1);
    std::vector<double> times;
    for (int i = 0; i < 50; ++i) times.push_back(0.3 * i);
    const EchoSeries s = pair_echo_series(a, b, times);
    REQUIRE(s.d_values);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(s.values[i] <= 1.0 + 1e-12);
        CHECK(s.values[i] == doctest::Approx(std::sqrt(a.echo(times[i]) * b.echo(times[i]))).epsilon(1e-10));
    }
}

TEST_CASE("Gaussian decay rate") {
    const auto c = ring_couplings(1000, 0.9, 0.0);
    const double expected = 8.0 * 1.0 * 1000 * 27 / (3.0 * std::numbers::pi * 0.01) / 1000;
    CHECK(gaussian_rate(1000, 1.0, c, 3) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(gaussian_rate(1000, 1.0, ring_couplings(1000, 0.9, std::numbers::pi / 3), 1) ==
          doctest::Approx(gaussian_rate(1000, 1.0, c, 1) / 4).epsilon(1e-12));
    CHECK_THROWS_AS((void)gaussian_rate(1000, 1.0, ring_couplings(1000, 1.0, 0.0)), std::domain_error);
    CHECK_THROWS_AS((void)gaussian_rate(1000, 1.0, c, 0), std::invalid_argument);
}

TEST_CASE("Gaussian fit recovers a synthetic rate") {
    EchoSeries s;
    for (int i = 0; i < 400; ++i) {
        const double t = 0.005 * i;
        s.times.push_back(t);
        s.values.push_back(std::exp(-2.5 * t * t));
    }
    const GaussianFit fit = fit_gaussian_decay(s, 0.5);
    CHECK(fit.rate == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(fit.rel_residual < 1e-10);
    CHECK(fit.window_end == doctest::Approx(std::sqrt(std::log(2.0) / 2.5)).epsilon(0.01));
}

TEST_CASE("early decay of a large ring is Gaussian") {
    const auto c = ring_couplings(1000, 0.9, 0.0);
    const EchoContext ctx(1000, 1.0, c);
    EchoSeries s;
    for (int i = 0; i < 4000; ++i) {
        s.times.push_back(0.0005 * i);
        s.values.push_back(ctx.echo(s.times.back()));
    }
    const GaussianFit fit = fit_gaussian_decay(s);
    CHECK(fit.rel_residual < 0.05);
    CHECK(fit.rate > 0.0);

    const CutoffCalibration cal = calibrate_cutoff(1000, 1.0, c);
    CHECK(cal.cutoff_modes == kDefaultCutoffModes);
    CHECK(cal.fitted_rate == doctest::Approx(fit.rate).epsilon(0.02));
}
