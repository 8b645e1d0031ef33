#include "saltda/errors.hpp"

namespace saltda {

void require_input(bool condition, const std::string& message) {
    if (!condition) throw InputError(message);
}

void require_parameter(bool condition, const std::string& message) {
    if (!condition) throw ParameterError(message);
}

}  // namespace saltda
