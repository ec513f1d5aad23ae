#include "cli.hpp"

int main(int argc, char** argv) { return levyfk::cli::run(argc, argv); }
