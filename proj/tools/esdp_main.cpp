#include "esdp/cli.h"

#include <iostream>

int main(int argc, char** argv) { return esdp::run_cli(argc, argv, std::cout, std::cerr, std::cin); }
