// qflow.cpp: Command-line executable

#include <iostream>

#include "qflow/cli.hpp"

int main(int argc, char** argv) { return qflow::cli::run(argc, argv, std::cout, std::cerr); }
