#pragma once

#include <stdexcept>
#include <string>

namespace lambtrap {

// Base class for all numerical failures raised by the library.  The CLI maps
// these to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BracketFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct ConvergenceFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct RootCountMismatch : NumericalError {
    using NumericalError::NumericalError;
};
struct NotAnEigenpair : NumericalError {
    using NumericalError::NumericalError;
};
struct GammaZero : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularSystem : NumericalError {
    using NumericalError::NumericalError;
};
struct OnEssentialSpectrum : NumericalError {
    using NumericalError::NumericalError;
};
struct QuadratureFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct NoSignChange : NumericalError {
    using NumericalError::NumericalError;
};
struct FixedPointDivergence : NumericalError {
    using NumericalError::NumericalError;
};
struct DegenerateFit : NumericalError {
    using NumericalError::NumericalError;
};
struct IngredientMismatch : NumericalError {
    using NumericalError::NumericalError;
};

// Configuration / input problems.  The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lambtrap
