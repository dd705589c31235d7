#include "cascadeloc/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return cascadeloc::cli::run(argc, argv, std::cout, std::cerr); }
