#include <iostream>

#include "cli/cli.hpp"

int main(int argc, char** argv) { return rhc::cli::Run(argc, argv, std::cout, std::cerr); }
