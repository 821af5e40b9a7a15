#include <iostream>

#include "qsis/cli.hpp"

int main(int argc, char** argv) {
  return qsis::cli_main(argc, argv, std::cout, std::cerr);
}
