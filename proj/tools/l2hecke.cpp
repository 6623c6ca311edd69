#include <string>
#include <vector>

#include "l2hecke/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return l2hecke::cli::run_command(args);
}
