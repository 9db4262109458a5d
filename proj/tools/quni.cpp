#include "quni/cli.hpp"

int main(int argc, char** argv) { return quni::cli::run(argc, argv); }
