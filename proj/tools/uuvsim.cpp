#include <iostream>

#include "uuvsim/cli.hpp"

int main(int argc, char** argv) { return uuvsim::cli_main(argc, argv, std::cout, std::cerr); }
