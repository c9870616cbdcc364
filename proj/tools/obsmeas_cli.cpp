#include "obsmeas/cli/run.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return obsmeas::cli::run_main(argc, argv, std::cout, std::cerr);
}
