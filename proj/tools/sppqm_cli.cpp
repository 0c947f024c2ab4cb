#include <iostream>

#include "sppqm/commands.hpp"

int main(int argc, char** argv) { return sppqm::run_cli(argc, argv, std::cout, std::cerr); }
