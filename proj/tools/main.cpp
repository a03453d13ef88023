#include <string>
#include <vector>

#include "matsketch/cli.hpp"

int main(int argc, char** argv) {
  return matsketch::cli_dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
