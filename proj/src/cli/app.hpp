#pragma once

#include <iosfwd>

namespace mtmeta::cli {

/// Exit codes: 0 success, 1 internal error, 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mtmeta::cli
