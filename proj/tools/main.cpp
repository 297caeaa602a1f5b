#include "cli.hpp"

int main(int argc, char** argv) { return prodlex::cli::run(argc, argv); }
