#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ztl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::map<std::string, std::string> environment;
  if (const char* workers = std::getenv("ZTL_WORKERS")) environment["ZTL_WORKERS"] = workers;
  return ztl::run_cli(args, environment, std::cout, std::cerr);
}
