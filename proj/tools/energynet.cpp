#include "energynet/cli.hpp"

int main(int argc, char** argv) { return energynet::cli::run(argc, argv); }
