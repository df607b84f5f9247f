#include "volterra/cli.hpp"

int main(int argc, char** argv) {
    return volterra::run_cli(argc, argv);
}
