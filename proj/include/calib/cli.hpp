#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace calib::cli {

/// Runs one toolkit command. `args` excludes the program name. Normal output
/// goes to `out`, diagnostics to `err`. Returns the process exit code:
/// 0 on success, 1 for validation/usage errors, 2 for I/O errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace calib::cli
