#include <iostream>

#include "ccdc/cli.hpp"

int main(int argc, char** argv) {
    return ccdc::run_cli(argc, argv, std::cout, std::cerr);
}
