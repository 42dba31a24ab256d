#include "ferrobvp/cli.hpp"

int main(int argc, char** argv) { return ferrobvp::cli::run(argc, argv); }
