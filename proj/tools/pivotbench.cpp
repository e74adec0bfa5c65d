#include "pivotbench/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pivotbench::cli_dispatch(argc, argv, std::cout, std::cerr); }
