#include "muskat/cli.hpp"

int main(int argc, char** argv) { return muskat::run_cli(argc, argv); }
