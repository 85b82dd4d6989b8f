#pragma once

#include <functional>
#include <iosfwd>
#include <string>

namespace trajmine {

/// Renders a double with a fixed number of decimal places ("%.6f" style).
/// All CSV output goes through this so diffs are byte-stable.
std::string format_fixed(double value, int places = 6);

/// Writes `body` to `path` via a temporary file in the same directory,
/// renaming into place only after the stream closed cleanly. A failure
/// leaves any pre-existing file untouched.
void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& body);

}  // namespace trajmine
