#pragma once

#include <stdexcept>
#include <string>

namespace lpm {

/// Base of every error raised by the library. Each subclass names the
/// precondition family that failed so callers (and the CLI) can report it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration parameters.
class ConfigError : public Error { using Error::Error; };
// Time argument not aligned with the discretisation grid.
class AlignmentError : public Error { using Error::Error; };
// Requested window not covered by the available noise/trajectory data.
class CoverageError : public Error { using Error::Error; };
// Argument outside the mathematical domain of an operation.
class DomainError : public Error { using Error::Error; };
// lambda too close to (or inside) the spectrum.
class SpectrumError : public Error { using Error::Error; };
class NumericalError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class DivergenceError : public Error { using Error::Error; };
// exp() argument large enough to overflow.
class RangeError : public Error { using Error::Error; };
// A spectral-gap certificate required by the computation did not pass.
class AdmissionError : public Error { using Error::Error; };
// Optional capability missing (e.g. no Jacobian supplied).
class CapabilityError : public Error { using Error::Error; };
// Observed contraction worse than the certified factor.
class CertificationMismatch : public Error { using Error::Error; };
class OracleError : public Error { using Error::Error; };

}  // namespace lpm
