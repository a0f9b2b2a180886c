#include "cli.hpp"

int main(int argc, char** argv) { return patronage::cli::run(argc, argv); }
