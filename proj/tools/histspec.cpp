#include <string>
#include <vector>

#include "histspec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return histspec::run(args);
}
