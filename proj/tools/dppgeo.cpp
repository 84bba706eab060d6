#include <iostream>
#include <string>
#include <vector>

#include "dppgeo/cli/cli.hpp"

int main(int argc, char** argv) {
  return dppgeo::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
