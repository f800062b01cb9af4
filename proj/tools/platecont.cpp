#include <iostream>

#include "platecont/cli.hpp"

int main(int argc, char** argv) { return platecont::run_cli(argc, argv, std::cout, std::cerr); }
