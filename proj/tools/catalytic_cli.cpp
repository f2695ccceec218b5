#include <iostream>

#include "catalytic/cli.hpp"

int main(int argc, char** argv) { return catalytic::run(argc, argv, std::cout, std::cerr); }
