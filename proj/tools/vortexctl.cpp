#include <iostream>

#include "vortex/cli.hpp"

int main(int argc, char** argv) { return vortex::cli::run(argc, argv, std::cout, std::cerr); }
