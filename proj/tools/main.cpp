#include "cli.hpp"

int main(int argc, char** argv) { return actionswitch::cli::run({argv, argv + argc}); }
