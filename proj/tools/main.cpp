#include "annkin/cli.hpp"

int main(int argc, char** argv) { return annkin::cli::cli_main(argc, argv); }
