#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wrlda::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kDataError = 2;
inline constexpr int kNumericalError = 3;

inline constexpr const char* kEngineVersion = "0.1.0";

/// Entry point shared by the executable and the tests. Subcommands: fit,
/// eval, topics, graph {build-dict, validate, stats}.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

}  // namespace wrlda::cli
