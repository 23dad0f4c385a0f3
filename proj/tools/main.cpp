#include "cli_main.hpp"

int main(int argc, char** argv) { return alphasign::cli_run(argc, argv); }
