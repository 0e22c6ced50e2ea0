#include "gafzero/cli.hpp"

int main(int argc, char** argv) { return gafzero::run_command(argc, argv); }
