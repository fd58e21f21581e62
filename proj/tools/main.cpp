#include "cli/commands.hpp"

int main(int argc, char** argv) { return liouville::cli::run_cli(argc, argv); }
