#include "boxrel/cli.hpp"

int main(int argc, char** argv) { return boxrel::cli::run_cli(argc, argv); }
