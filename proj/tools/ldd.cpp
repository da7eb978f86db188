#include "ldd/bridge/cli.hpp"

int main(int argc, char** argv) { return ldd::run_cli(argc, argv); }
