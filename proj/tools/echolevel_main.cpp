#include "echolevel/cli.hpp"

int main(int argc, char** argv) { return echolevel::run_cli(argc, argv); }
