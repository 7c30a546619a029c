// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace prober::cli {

/// Parses argv and runs one subcommand.
///
///   run <config> <inputs>
///   trace <runId> <record> --kind {all,any,uni,int,imp} [--k N] [--bound B] [--budget E] [--chain]
///   infer-props --op <id> [--trials N] [--seed S]
///   oracle
///   bench
///   serve [--addr host:port]
///
/// Returns 0 on success, 1 on a user error, 2 on an engine error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prober::cli
