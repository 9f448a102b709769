#include <iostream>

#include "celleval/cli.hpp"

int main(int argc, char** argv) {
    return celleval::run_cli(argc, argv, std::cout, std::cerr);
}
