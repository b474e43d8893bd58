#include "rwl/cli.hpp"

int main(int argc, char** argv) { return rwl::cli::dispatch(argc, argv); }
