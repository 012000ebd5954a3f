#include <iostream>
#include <string>
#include <vector>

#include "vardet/cli_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vardet::cli::run(args, std::cout, std::cerr);
}
