#include "finflow/cli/commands.hpp"

int main(int argc, char** argv) { return finflow::cli::run(argc, argv); }
