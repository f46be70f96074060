#include "pvscm/cli.hpp"

int main(int argc, char** argv) { return pvscm::cli::run(argc, argv); }
