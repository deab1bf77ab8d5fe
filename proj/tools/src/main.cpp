#include <iostream>

#include "ahrs_cli/commands.hpp"

int main(int argc, char** argv) { return ahrs::cli::run(argc, argv, std::cout, std::cerr); }
