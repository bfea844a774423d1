// cli.hpp: command-line front end

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qheat {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitTolerance = 3 };

/// args excludes the program name. Results go to out, diagnostics to err.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qheat
