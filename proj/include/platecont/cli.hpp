#pragma once

#include <ostream>

namespace platecont {

/// Exit codes: 0 success, 1 error, 2 analysis-level rejection.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace platecont
