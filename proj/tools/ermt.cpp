#include "ermt/cli.hpp"

int main(int argc, char** argv) { return ermt::cli::run(argc, argv); }
