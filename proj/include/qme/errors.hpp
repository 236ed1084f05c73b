// errors.hpp — Exception hierarchy shared by all qme modules

#pragma once

#include <stdexcept>
#include <string>

namespace qme {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape / input validation
struct NonSquare : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct LengthNotSquare : Error { using Error::Error; };
struct NonHermitian : Error { using Error::Error; };
struct NonHermitianHamiltonian : NonHermitian { using NonHermitian::NonHermitian; };

// Numerical failures
struct EmptyNullSpace : Error { using Error::Error; };
struct DefectiveGenerator : Error { using Error::Error; };
struct StepSizeUnderflow : Error { using Error::Error; };
struct JumpBudgetExceeded : Error { using Error::Error; };
struct ZeroNorm : Error { using Error::Error; };
struct DegenerateSpectrum : Error { using Error::Error; };
struct NonUniqueSteadyState : Error { using Error::Error; };
struct TruncationNotConverged : Error { using Error::Error; };
struct NonUnitaryPropagator : Error { using Error::Error; };

// Configuration / CLI
struct ConfigError : Error { using Error::Error; };

} // namespace qme
