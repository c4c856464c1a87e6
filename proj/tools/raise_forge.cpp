#include <string>
#include <vector>

#include "raise/cli.hpp"

int main(int argc, char** argv) {
  return raise::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
