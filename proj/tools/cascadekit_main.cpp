#include "cascadekit/cli.hpp"

int main(int argc, char** argv) { return cascadekit::cli::dispatch(argc, argv); }
