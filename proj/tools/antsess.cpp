#include <iostream>

#include "antsess/cli.hpp"

int main(int argc, char** argv) {
  return antsess::cli::main(argc, argv, std::cout, std::cerr);
}
