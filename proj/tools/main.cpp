#include <seqmet/harness.hpp>

int main(int argc, char** argv) { return seqmet::run_cli(argc, argv); }
