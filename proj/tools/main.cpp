#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cubic3::cli::run(argc, argv, std::cout, std::cerr); }
