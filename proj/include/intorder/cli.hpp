#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace intorder::cli {

// Process exit codes.
inline constexpr int kExitAccept = 0;
inline constexpr int kExitRejectLower = 10;
inline constexpr int kExitRejectUpper = 11;
inline constexpr int kExitFractional = 12;  // classify settled on a non-integer range
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;        // parse, domain or dimension errors in the input
inline constexpr int kExitNoInput = 66;
inline constexpr int kExitDegenerate = 67;
inline constexpr int kExitInternal = 70;
inline constexpr int kExitIo = 74;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace intorder::cli
