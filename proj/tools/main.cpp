#include <iostream>

#include "graphlap_cli/cli.hpp"

int main(int argc, char **argv) {
  return graphlap::cli::dispatch(argc, argv, std::cout, std::cerr);
}
