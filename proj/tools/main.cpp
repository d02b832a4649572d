#include <iostream>

#include "localmean/cli.hpp"

int main(int argc, char** argv) { return localmean::run_cli(argc, argv, std::cout, std::cerr); }
