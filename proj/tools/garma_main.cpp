#include <iostream>

#include "garma/cli.hpp"

int main(int argc, char** argv) { return garma::run_cli(argc, argv, std::cout, std::cerr); }
