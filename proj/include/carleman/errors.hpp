#pragma once

#include <stdexcept>
#include <string>

namespace carleman {

// Precondition or malformed input.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The stored table cannot answer the query; retry with a larger J_max.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature, extraction or fit did not converge.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace carleman
