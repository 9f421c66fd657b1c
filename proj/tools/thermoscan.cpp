#include <iostream>

#include "thermoscan/cli.hpp"

int main(int argc, char** argv) { return thermoscan::cli::run(argc, argv, std::cout, std::cerr); }
