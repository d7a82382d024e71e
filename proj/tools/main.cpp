#include <iostream>

#include "qdot/cli.hpp"

int main(int argc, char** argv) { return qdot::run_cli(argc, argv, std::cout, std::cerr); }
