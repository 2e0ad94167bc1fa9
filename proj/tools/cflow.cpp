#include <iostream>

#include "cflow/cli.hpp"

int main(int argc, char** argv) { return cflow::cli::main_entry(argc, argv, std::cout, std::cerr); }
