#include <iostream>

#include "claimalign/cli.hpp"

int main(int argc, char** argv) {
  return claimalign::cli::run(argc, argv, std::cout, std::cerr);
}
