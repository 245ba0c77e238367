#include <string>
#include <vector>

#include "alignguard_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return alignguard::cli::run(args);
}
