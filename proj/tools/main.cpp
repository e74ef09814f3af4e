#include "channelstab/cli.hpp"

int main(int argc, char** argv) { return cstab::run_cli(argc, argv); }
