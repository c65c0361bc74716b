#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specflow::cli {

/// Runs `<command> --config <path> [--key value ...] --out <dir>` and
/// returns the process exit code: 0 success, 2 input or validation error,
/// 3 numerical failure. Errors are written to `err` as a JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace specflow::cli
