#include <iostream>

#include "strkm/cli.hpp"

int main(int argc, char** argv) { return strkm::run_cli(argc, argv, std::cout, std::cerr); }
