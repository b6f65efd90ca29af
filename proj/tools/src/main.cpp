#include <iostream>

#include "fwdflat_cli/cli.hpp"

int main(int argc, char** argv) { return fwdflat::cli::run(argc, argv, std::cout, std::cerr); }
