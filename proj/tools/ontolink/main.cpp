#include <iostream>
#include <string>
#include <vector>

#include "ontolink/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ontolink::app::run(args, std::cout, std::cerr);
}
