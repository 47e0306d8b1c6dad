#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "fvvisc_cli/app.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return fvvisc::cli::run_cli(args, std::cout, std::cerr,
                              [](const char* name) { return std::getenv(name); });
}
