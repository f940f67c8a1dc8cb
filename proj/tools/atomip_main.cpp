#include <iostream>

#include "atomip/cli.hpp"

int main(int argc, char** argv) {
  return atomip::cli::run(argc, argv, std::cout, std::cerr);
}
