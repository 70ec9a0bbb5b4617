#include "cli.hpp"

int main(int argc, char** argv) { return leadlag::cli::main_entry(argc, argv); }
