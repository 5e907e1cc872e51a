#include "uvsb/cli.hpp"

int main(int argc, char** argv) { return uvsb::cli::run(argc, argv); }
