#pragma once

#include <stdexcept>
#include <string>

namespace sradapt {

// Single exception type for every recoverable failure in the library.
// Messages are meant for end users; the CLI prints what() verbatim.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sradapt
