#include "kreg/cli.hpp"

int main(int argc, char** argv) { return kreg::cli::run(argc, argv); }
