#include "gtf/cli.hpp"

int main(int argc, char** argv) {
  return gtf::run_cli(argc, argv);
}
