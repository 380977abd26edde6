#include "cfcal/cli.hpp"

int main(int argc, char** argv) { return cfcal::cli::cli_dispatch(argc, argv); }
