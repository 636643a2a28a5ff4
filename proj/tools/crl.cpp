#include <iostream>

#include "crl/cli.hpp"

int main(int argc, char** argv) {
  return crl::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
