#include "qclt/harness/cli.hpp"

int main(int argc, char** argv) { return qclt::harness::run_cli(argc, argv); }
