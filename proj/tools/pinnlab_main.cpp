#include "pinnlab/cli.hpp"

int main(int argc, char** argv) { return pinnlab::cli_main(argc, argv); }
