#include <iostream>

#include "akit/cli/run.hpp"

int main(int argc, char** argv) { return akit::cli::main_entry(argc, argv, std::cout, std::cerr); }
