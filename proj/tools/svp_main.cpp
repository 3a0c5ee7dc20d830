#include "svp/cli.hpp"

int main(int argc, char** argv) { return svp::run_cli(argc, argv); }
