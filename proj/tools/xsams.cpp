#include <iostream>

#include "xsams/cli.hpp"

int main(int argc, char** argv) { return xsams::cli::run(argc, argv, std::cout, std::cerr); }
