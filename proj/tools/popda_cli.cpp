#include "popda/experiment.hpp"

int main(int argc, char** argv) { return popda::cli_main(argc, argv); }
