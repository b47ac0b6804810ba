#include "metaweave/cli.hpp"

int main(int argc, char** argv) { return metaweave::cli::run(argc, argv); }
