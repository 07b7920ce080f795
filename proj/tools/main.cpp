#include "squeezenh/cli.hpp"

int main(int argc, char** argv) { return squeezenh::cli_main(argc, argv); }
