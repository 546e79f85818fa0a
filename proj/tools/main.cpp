#include <string>
#include <vector>

#include "brdffield/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return brdffield::run_cli(args);
}
