#pragma once

#include <stdexcept>
#include <string>

namespace semilin {

// Configuration / precondition violations (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The contraction hypothesis rho = C1*C^2 + C2*C < 1 failed; the iteration
// refuses to start (CLI exit code 3).
struct CertificateError : std::runtime_error {
    double rho;
    explicit CertificateError(double rho_, const std::string& what)
        : std::runtime_error(what), rho(rho_) {}
};

// Solver breakdown, non-convergence, indefinite assembly (CLI exit code 4).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semilin
