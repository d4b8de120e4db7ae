#pragma once

#include <iosfwd>

namespace pip {

/// Operator command line. Results go to `out` as JSON or CSV; diagnostics to
/// `err`. Returns 0 on success, 1 on a pipeline error and 2 on a usage error.
///
///   piptool [--config F] [--workspace D] [--dry-run] <command> ...
///
/// Without --config, `<workspace>/piptool.conf` is read when present.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pip
