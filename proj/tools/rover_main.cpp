#include <iostream>

#include "rover/cli.hpp"

int main(int argc, char** argv) {
  return rover::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
