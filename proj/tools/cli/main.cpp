// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli/cli.hpp"

int main(int argc, char** argv) { return prober::cli::run_cli(argc, argv, std::cout, std::cerr); }
