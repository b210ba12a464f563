#include <iostream>

#include "accmarket/cli.hpp"

int main(int argc, char** argv) { return accmarket::cli::run(argc, argv, std::cout, std::cerr); }
