#pragma once

// Oracle-equivalence and closed-form suites behind `compass check`.

#include <iosfwd>
#include <string>
#include <vector>

namespace compass {

struct SuiteResult {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    bool informational = false;  // reported, never fails the run
    std::string detail;
};

struct ValidationReport {
    std::vector<SuiteResult> suites;
    [[nodiscard]] bool passed() const;
};

struct ValidationOptions {
    /// Fault injection for mutation testing: negate lambda- in the couplings
    /// handed to the engines.
    bool flip_lambda_minus = false;
};

[[nodiscard]] ValidationReport run_validation(const ValidationOptions& options = {});

void print_report(const ValidationReport& report, std::ostream& out);

}  // namespace compass
