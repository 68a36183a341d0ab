#include "compass/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "compass/ed_oracle.hpp"
#include "compass/fermion_echo.hpp"
#include "compass/sweep.hpp"
#include "compass/yield_engine.hpp"

namespace compass {

bool ValidationReport::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.informational || s.passed; });
}

namespace {

DerivedCouplings engine_couplings(double lambda, double g, double theta, const ValidationOptions& options) {
    DerivedCouplings c = couplings_from_lambda(lambda, g, theta);
    if (options.flip_lambda_minus) c.lambda_minus = -c.lambda_minus;
    return c;
}

SuiteResult finish(SuiteResult s) {
    s.passed = std::isfinite(s.max_deviation) && s.max_deviation <= s.tolerance;
    return s;
}

SuiteResult pure_echo_suite(const ValidationOptions& options) {
    SuiteResult s{"pure echo: fermion vs ED, N = 2..10", 0.0, 1e-8, false, false, {}};
    for (int N : {2, 4, 6, 8, 10}) {
        const double g = 1.0 / std::sqrt(static_cast<double>(N));
        for (double lambda : {0.5, 0.9, 1.0, 1.1}) {
            for (double theta : {0.0, std::numbers::pi / 4}) {
                const DerivedCouplings c = engine_couplings(lambda, g, theta, options);
                const EchoContext fermion(N, 1.0, c);
                const auto ed = ed::make_echo_context(N, 1.0, c, 0.0, ed::Boundary::periodic);
                for (int i = 0; i < 200; ++i) {
                    const double t = 20.0 * i / 199.0;
                    s.max_deviation = std::max(s.max_deviation, std::abs(fermion.echo(t) - ed.echo(t)));
                }
            }
        }
    }
    return finish(s);
}

SuiteResult two_spin_suite(const ValidationOptions& options) {
    SuiteResult s{"N = 2 closed form vs open-chain ED", 0.0, 1e-10, false, false, {}};
    for (double lambda : {0.5, 1.0, 1.5}) {
        for (double shift : {0.05, 0.1}) {
            const DerivedCouplings c = engine_couplings(lambda, shift, 0.0, options);
            const auto ed = ed::make_echo_context(2, 1.0, c, 0.0, ed::Boundary::open, c.lambda_minus);
            for (int i = 0; i <= 200; ++i) {
                const double t = 10.0 * i / 200.0;
                s.max_deviation = std::max(s.max_deviation, std::abs(ed.echo(t) - le_n2(lambda, shift, 0.0, t)));
            }
        }
    }
    return finish(s);
}

double thermal_deviation(int N, double T, ed::Boundary boundary, const ValidationOptions& options) {
    const DerivedCouplings c = engine_couplings(0.9, 1.0 / std::sqrt(static_cast<double>(N)), 0.0, options);
    const EchoContext fermion(N, 1.0, c, T);
    const auto ed = ed::make_echo_context(N, 1.0, c, T, boundary);
    double dev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double t = 10.0 * i / 100.0;
        dev = std::max(dev, std::abs(fermion.echo(t) - ed.echo(t)));
    }
    return dev;
}

SuiteResult thermal_twisted_suite(const ValidationOptions& options) {
    SuiteResult s{"thermal echo: fermion vs twisted-boundary ED", 0.0, 1e-10, false, false, {}};
    for (int N : {4, 6, 8})
        for (double T : {0.2, 1.0})
            s.max_deviation = std::max(s.max_deviation, thermal_deviation(N, T, ed::Boundary::twisted, options));
    return finish(s);
}

SuiteResult thermal_periodic_suite(const ValidationOptions& options) {
    SuiteResult s{"thermal echo: fermion vs periodic Gibbs ED (N = 8)", 0.0, 5e-2, false, false, {}};
    char buf[160];
    const double d02 = thermal_deviation(8, 0.2, ed::Boundary::periodic, options);
    const double d10 = thermal_deviation(8, 1.0, ed::Boundary::periodic, options);
    s.max_deviation = std::max(d02, d10);
    std::snprintf(buf, sizeof buf, "T = 0.2: %.3g, T = 1.0: %.3g (per-mode ensemble omits the odd-parity sector)", d02,
                  d10);
    s.detail = buf;
    s = finish(s);
    s.informational = true;
    return s;
}

SuiteResult quadrature_suite(const char* name, std::function<double(double)> echo, double max_frequency, double k_S,
                             double expected) {
    SuiteResult s{name, 0.0, QuadratureConfig{}.rel_tol, false, false, {}};
    const YieldResult y = product_yield(make_provider(std::move(echo), max_frequency), k_S);
    s.max_deviation = std::abs(y.phi_s - expected);
    return finish(s);
}

SuiteResult gaussian_prefactor_suite() {
    SuiteResult s{"Gaussian closed form: printed vs integrated prefactor", 0.0, 1e-12, false, false, {}};
    const GaussianYield y = yield_gaussian(1.0, 0.1);
    s.max_deviation = std::abs(y.prefactor_ratio() - 2.0 * std::numbers::sqrt2);
    char buf[160];
    std::snprintf(buf, sizeof buf, "printed %.12f, integrated %.12f, ratio of excesses %.12f", y.printed, y.rederived,
                  y.prefactor_ratio());
    s.detail = buf;
    return finish(s);
}

SuiteResult small_rate_suite() {
    SuiteResult s{"small-k_S form: kink, symmetry, linearity", 0.0, 1e-12, false, false, {}};
    const double g = 1.0 / std::sqrt(1000.0);
    const double at_critical = yield_small_ks(1.0, 1.0, g, 0.0, 1000, 3, 0.01).phi_s;
    const double left = yield_small_ks(0.9, 1.0, g, 0.0, 1000, 3, 0.01).phi_s;
    const double right = yield_small_ks(1.1, 1.0, g, 0.0, 1000, 3, 0.01).phi_s;
    const double doubled = yield_small_ks(0.9, 1.0, g, 0.0, 1000, 3, 0.02).phi_s;
    s.max_deviation = std::max({std::abs(at_critical - 0.5), std::abs(left - right),
                                std::abs((doubled - 0.5) - 2.0 * (left - 0.5))});
    return finish(s);
}

SuiteResult limits_suite() {
    SuiteResult s{"analytic limits: theta = pi/2 and g0 = 0 give Phi_S = 1", 0.0, 1e-9, false, false, {}};
    PointParams p;
    p.T = 0.2;
    p.theta = std::numbers::pi / 2;
    s.max_deviation = std::abs(point_yield(p, Engine::fermion, {}).phi_s - 1.0);
    p.theta = 0.3;
    p.g0 = 0.0;
    s.max_deviation = std::max(s.max_deviation, std::abs(point_yield(p, Engine::fermion, {}).phi_s - 1.0));
    return finish(s);
}

}  // namespace

ValidationReport run_validation(const ValidationOptions& options) {
    ValidationReport report;
    auto& suites = report.suites;
    suites.push_back(pure_echo_suite(options));
    suites.push_back(two_spin_suite(options));
    suites.push_back(thermal_twisted_suite(options));
    suites.push_back(thermal_periodic_suite(options));
    suites.push_back(quadrature_suite("quadrature: constant echo", [](double) { return 1.0; }, 0.0, 0.1, 1.0));
    suites.push_back(quadrature_suite("quadrature: exponential echo", [](double t) { return std::exp(-0.3 * t); }, 0.0,
                                      0.1, 0.5 + 0.1 / (2.0 * (0.1 + 0.3))));
    suites.push_back(quadrature_suite("quadrature: Gaussian echo", [](double t) { return std::exp(-t * t); }, 0.0, 0.1,
                                      yield_gaussian(1.0, 0.1).rederived));
    suites.push_back(gaussian_prefactor_suite());
    suites.push_back(small_rate_suite());
    suites.push_back(limits_suite());
    return report;
}

void print_report(const ValidationReport& report, std::ostream& out) {
    char line[256];
    for (const SuiteResult& s : report.suites) {
        const char* verdict = s.informational ? "INFO" : (s.passed ? "PASS" : "FAIL");
        std::snprintf(line, sizeof line, "%-4s  %-58s max dev %.3e  (tol %.1e)", verdict, s.name.c_str(),
                      s.max_deviation, s.tolerance);
        out << line << '\n';
        if (!s.detail.empty()) out << "      " << s.detail << '\n';
    }
    out << (report.passed() ? "all suites passed" : "validation FAILED") << '\n';
}

}  // namespace compass
