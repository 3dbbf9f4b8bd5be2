#include <iostream>

#include "npspec/cli.hpp"

int main(int argc, char** argv) { return npspec::cli::run(argc, argv, std::cout, std::cerr); }
