#include <iostream>

#include "odelab/cli.hpp"

int main(int argc, char** argv) { return odelab::dispatch(argc, argv, std::cout, std::cerr); }
