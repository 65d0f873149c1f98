#pragma once

#include <stdexcept>
#include <string>

namespace coopdde {

/// Violation of a structural precondition (shape, sign pattern, dimension).
class StructuralError : public std::invalid_argument {
public:
    explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: non-convergence, internal cross-check disagreement.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace coopdde
