#pragma once

#include <stdexcept>
#include <string>

namespace saltda {

/// Malformed or inconsistent input data (non-finite values, grid mismatch, out-of-domain points).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configuration or numerical parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// All particles carry zero likelihood, or tempering cannot make progress.
class DegenerateEnsembleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Binary or text file that fails magic, version or length validation.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time step exceeds the configured CFL bound and the run was configured to abort.
class CflViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require_input(bool condition, const std::string& message);
void require_parameter(bool condition, const std::string& message);

}  // namespace saltda
