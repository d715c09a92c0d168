#pragma once

#include <stdexcept>
#include <string>

namespace graphvar {

/// Malformed or inconsistent input (bad graph records, mixed sizes, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A well-formed request the library refuses to run (e.g. census beyond n = 7).
class InfeasibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace graphvar
