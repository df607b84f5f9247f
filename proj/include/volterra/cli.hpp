#pragma once

// ============================================================================
// Command-line surface: forward sampling, both inversions, and the
// convergence experiment.  See README.md for usage and examples.
// ============================================================================

namespace volterra {

/// Parse arguments and run one subcommand.  Returns the process exit code:
/// 0 on success, 1 on a validation error, 2 on an I/O error.
[[nodiscard]] int run_cli(int argc, const char* const* argv);

} // namespace volterra
