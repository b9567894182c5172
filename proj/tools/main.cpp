#include <iostream>

#include "polsq/commands.hpp"

int main(int argc, char** argv) { return polsq::run_cli(argc, argv, std::cout, std::cerr); }
