#include <iostream>

#include "cohomqe/cli.hpp"

int main(int argc, char** argv) {
  return cohomqe::dispatch(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
