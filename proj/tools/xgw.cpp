#include <iostream>

#include "xgw/app/cli.hpp"

int main(int argc, char** argv) {
  return xgw::app::run_cli(argc, argv, std::cout, std::cerr);
}
