#include "svo/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return svo::cli::run(argc, argv, std::cout, std::cerr); }
