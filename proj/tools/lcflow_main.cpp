/// @file lcflow_main.cpp
/// @brief Process entry point for the lcflow command-line tool.

#include "lcflow/cli.hpp"

int main(int argc, char** argv) { return lcflow::cli::run_main(argc, argv); }
