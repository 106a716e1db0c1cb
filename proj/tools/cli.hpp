#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mapseg::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Entry point behind the `mapseg` executable. `args` excludes the program
/// name. Returns 0 on success, 1 on usage errors, 2 on data errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mapseg::cli
