#include "radbound/cli_run.hpp"

int main(int argc, char** argv) { return radbound::cli::main_entry(argc, argv); }
