#include <cstdlib>
#include <iostream>
#include <unistd.h>

#include "strainmix/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  strainmix::CliOptions options;
  options.color = std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO);
  return strainmix::run_command(args, std::cout, std::cerr, options);
}
