#include "cran/harness.hpp"

int main(int argc, char** argv) { return cran::cli_main(argc, argv); }
