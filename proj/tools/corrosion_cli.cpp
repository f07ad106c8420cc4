#include "corrosion/cli.hpp"

int main(int argc, char** argv) { return corrosion::cli::run(argc, argv); }
