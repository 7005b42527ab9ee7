#include "ucd/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ucd::run_cli(argc, argv, std::cout); }
