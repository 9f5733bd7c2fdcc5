#pragma once

#include <ostream>

namespace slc::cli {

// Exit status: 0 success, 1 verify failures, 2 configuration or domain
// error, 3 non-convergence.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slc::cli
