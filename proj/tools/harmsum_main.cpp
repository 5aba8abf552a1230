// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "harmsum/cli.hpp"

int main(int argc, char** argv) { return harmsum::cli::run_cli(argc, argv, std::cout, std::cerr); }
