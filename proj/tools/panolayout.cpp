#include "panolayout/cli.hpp"

int main(int argc, char** argv) { return panolayout::cli::run(argc, argv); }
