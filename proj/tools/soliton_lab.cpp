#include "cli.hpp"

int main(int argc, char** argv) { return soliton_lab::cli::run(argc, argv); }
