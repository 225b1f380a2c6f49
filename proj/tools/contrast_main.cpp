#include <iostream>

#include "contrast/cli.hpp"

int main(int argc, char** argv) { return contrast::cli::run(argc, argv, std::cout, std::cerr); }
