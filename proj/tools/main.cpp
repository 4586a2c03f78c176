#include "adeqnn/cli.hpp"

int main(int argc, char** argv) { return adeqnn::cli::run(argc, argv); }
