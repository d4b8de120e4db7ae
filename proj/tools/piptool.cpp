#include <iostream>

#include "pip/cli.hpp"

int main(int argc, char** argv) { return pip::cli_main(argc, argv, std::cout, std::cerr); }
