#include "gbh/cli.hpp"

int main(int argc, char** argv) { return gbh::cli::run(argc, argv); }
