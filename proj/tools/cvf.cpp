#include <iostream>

#include "cvf/cli.hpp"

int main(int argc, char** argv) { return cvf::cli::main_entry(argc, argv, std::cout, std::cerr); }
