#include <iostream>

#include "ratiodyn/cli.hpp"

int main(int argc, char** argv) { return ratiodyn::cli::run(argc, argv, std::cout, std::cerr); }
