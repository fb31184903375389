#include "swformer_cli/commands.hpp"

int main(int argc, char** argv) { return swformer::cli::main_entry(argc, argv); }
