#include <iostream>

#include "alq/cli.hpp"

int main(int argc, char** argv) { return alq::run_cli(argc, argv, std::cout, std::cerr); }
