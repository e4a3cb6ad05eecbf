#include <iostream>

#include "lyk/cli.hpp"

int main(int argc, char** argv) { return lyk::cli::run(argc, argv, std::cout, std::cerr); }
