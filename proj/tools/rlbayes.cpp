#include "rlbayes/cli.hpp"

int main(int argc, char** argv) { return rlbayes::cli::run_cli(argc, argv); }
