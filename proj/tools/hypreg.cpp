#include <iostream>

#include "hypreg/cli.hpp"

int main(int argc, char** argv) { return hypreg::cli::run(argc, argv, std::cout, std::cerr); }
