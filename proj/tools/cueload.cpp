#include <iostream>

#include "cueload/cli.hpp"

int main(int argc, char** argv) { return cueload::run_cli(argc, argv, std::cout, std::cerr); }
