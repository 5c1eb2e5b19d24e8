#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ndkit::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kVerificationFailed = 2 };

/// Runs one command line (without the program name). The human block goes to
/// `out`, or the machine block when --csv is given; --out additionally writes
/// the machine block to a file. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Library operations each verb can invoke.
const std::map<std::string, std::vector<std::string>>& verb_operations();

}  // namespace ndkit::cli
