// Command-line front end: run | compare | validate.
#pragma once

#include <ostream>

namespace uuvsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalid = 2;  // load or validation failure
inline constexpr int kExitGuard = 3;    // runtime guard tripped

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uuvsim
