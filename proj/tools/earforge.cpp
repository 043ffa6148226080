#include "earforge/cli.hpp"

int main(int argc, char** argv) { return earforge::cli_main(argc, argv); }
