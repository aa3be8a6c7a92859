#include "dissipgate/cli.hpp"

int main(int argc, char** argv) { return dissipgate::run_cli(argc, argv); }
