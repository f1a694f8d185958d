#include "fgen/cli.hpp"

int main(int argc, char** argv) { return fgen::cli::run(argc, argv); }
