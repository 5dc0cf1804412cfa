#include "otmt/cli.hpp"

int main(int argc, char** argv) {
    return otmt::run_cli(argc, argv);
}
