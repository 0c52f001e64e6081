#include <iostream>

#include "wsvie/cli.hpp"

int main(int argc, char** argv) { return wsvie::cli::run(argc, argv, std::cout, std::cerr); }
