#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flatmarch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;  // bad scene, bad arguments
inline constexpr int kExitIo = 2;       // unreadable input or unwritable output

/// The `flatmarch` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flatmarch
