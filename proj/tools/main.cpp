#include "regcomp/cli.hpp"

int main(int argc, char** argv) { return regcomp::cli::main(argc, argv); }
