#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xxz::cli {

inline constexpr const char* kVersion = "0.1.0";

// Sector dimensions above this are refused unless --force is given.
inline constexpr std::size_t kMaxSectorDim = 5000000;
// Dense diagonalizations above this are refused unless --force is given.
inline constexpr std::size_t kMaxDenseDim = 4000;

// Runs one command. args excludes the program name. Returns the exit code:
// 0 success, 1 numerical failure (diagnostic payload written to the output),
// 2 usage or domain error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "3/2" -> 3, "2" -> 4. Throws DomainError for anything else.
int parse_spin(const std::string& text);

}  // namespace xxz::cli
