#include <iostream>

#include "wpcis/cli.hpp"

int main(int argc, char** argv) { return wpcis::cli::run(argc, argv, std::cout, std::cerr); }
