#pragma once

#include <iosfwd>

namespace sradapt {

// Entry point of the sradapt tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sradapt
