#include "twolevel/cli.hpp"

int main(int argc, char** argv) { return twolevel::run_cli(argc, argv); }
