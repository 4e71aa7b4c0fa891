#include "cascade_guard/cli.hpp"

int main(int argc, char** argv) { return cascade_guard::cli::dispatch(argc, argv); }
