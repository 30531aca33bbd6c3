#include "tokalign/cli.hpp"

int main(int argc, char** argv) { return tokalign::cli::main(argc, argv); }
