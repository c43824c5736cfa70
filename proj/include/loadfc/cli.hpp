// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace loadfc {

/// Runs one command line (args[0] is the program name) and returns the
/// process exit code: 0 success, 1 usage, 2 data, 3 numerical failure.
///
///   loadfc [--seed N] [--jobs N] [--out-dir DIR] <command> [options]
///
/// Commands: synth, ingest, featurize, train, compare, forecast, replay.
/// Each writes its outputs and a <command>.manifest into the output
/// directory; `replay --manifest FILE` re-runs a manifest after checking
/// the recorded input digests.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loadfc
