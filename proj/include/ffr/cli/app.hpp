#pragma once

#include <iosfwd>

namespace ffr::cli
{

enum ExitCode : int
{
    kOk = 0,
    kUsage = 1,
    kInfeasible = 2,
    kNumerical = 3,
};

/// Runs the command line front end with the given streams.
int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err);

} // namespace ffr::cli
