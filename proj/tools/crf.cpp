#include <iostream>

#include "crf/cli.hpp"

int main(int argc, char** argv) { return crf::run_cli(argc, argv, std::cout, std::cerr); }
