#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return vbwcli::run(argc, argv, std::cin, std::cout, std::cerr);
}
