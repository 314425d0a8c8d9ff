#include <iostream>

#include "cellflow/cli.hpp"

int main(int argc, char** argv) { return cellflow::cli::run(argc, argv, std::cout, std::cerr); }
