#include "rugged/cli.hpp"

int main(int argc, char** argv) { return rugged::cli::run(argc, argv); }
