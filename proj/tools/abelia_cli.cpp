// SPDX-License-Identifier: Apache-2.0
#include "abelia/cli.hpp"

int main(int argc, char** argv) { return abelia::cli::main_entry(argc, argv); }
