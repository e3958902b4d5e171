#include "latticesir/cli.hpp"

int main(int argc, char** argv) { return latticesir::run_cli(argc, argv); }
