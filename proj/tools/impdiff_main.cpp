#include "impdiff/cli.hpp"

int main(int argc, char** argv) { return impdiff::run_cli(argc, argv); }
