#include <iostream>

#include "lpdo_harness/commands.hpp"

int main(int argc, char** argv) { return lpdo::harness::run(argc, argv, std::cout, std::cerr); }
