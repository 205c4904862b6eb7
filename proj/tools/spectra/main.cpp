#include <iostream>

#include "spectra/commands.hpp"

int main(int argc, char** argv) {
  return spectra::cli::run(argc, argv, std::cout, std::cerr);
}
