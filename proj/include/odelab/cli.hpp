#pragma once
// Command-line front end. One process runs one subcommand, reads one JSON
// config, and writes its artifacts plus a run manifest into the output
// directory. All outputs are deterministic given the seed: reruns with the
// same manifest inputs reproduce every file bitwise.

#include <iosfwd>

namespace odelab {

// Routes argv to a subcommand runner. Returns the process exit code:
// 0 on success, 1 on a domain or validation error (message on `err`),
// 2 on a usage error (usage text on `err`).
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace odelab
