#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace spslab::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNonconvergence = 2;
inline constexpr int kAssertion = 3;
inline constexpr int kIo = 4;

// Version of the manifest and output layouts documented in README.md.
inline constexpr int kSchemaVersion = 1;

// Runs one command line (without the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

// "1,2,4", "1e2,1e3" or "4,8,...,256". The ellipsis continues the progression of the
// first two entries: geometric when that lands exactly on the last entry, else arithmetic.
std::vector<double> parse_list(const std::string& text);

// Writes through a temporary in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace spslab::cli
