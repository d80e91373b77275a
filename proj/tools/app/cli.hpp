#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gradlens::app {

/// Runs one gradlens command. `args` excludes the program name. Returns 0 on
/// success, 1 on usage errors and 2 on data errors. `color` enables bold
/// table headers.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            bool color = false);

}  // namespace gradlens::app
