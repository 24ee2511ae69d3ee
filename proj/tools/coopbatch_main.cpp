#include "coopbatch/cli.hpp"

int main(int argc, char** argv) {
  return coopbatch::cli_main(argc, argv);
}
