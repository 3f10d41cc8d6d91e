#include <cleanq/cli.hpp>

int main(int argc, char** argv) { return cleanq::cli::cli_main(argc, argv); }
