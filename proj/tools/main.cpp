#include "walrex/io.hpp"

int main(int argc, char** argv) { return walrex::cli_run(argc, argv); }
