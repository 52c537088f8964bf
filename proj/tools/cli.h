#pragma once

#include <iosfwd>

namespace dcs::cli {

// Parses argv and runs one subcommand. Returns 0 on success, 2 after a
// usage error (help text on `err`) and 1 after a runtime failure (a JSON
// {"kind", "message"} record on `err`). Results without an output path go
// to `out`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dcs::cli
