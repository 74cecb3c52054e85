#include <iostream>

#include "xkerr/cli.hpp"

int main(int argc, char** argv) {
    return xkerr::cli::run(argc, argv, std::cout, std::cerr);
}
