#include "scenrisk/cli.hpp"

int main(int argc, char** argv) { return scenrisk::run_cli(argc, argv); }
