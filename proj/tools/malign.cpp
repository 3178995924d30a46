#include "malign/cli.hpp"

int main(int argc, char** argv) { return malign::run_command(argc, argv); }
