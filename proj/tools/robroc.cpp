#include <iostream>

#include "robroc/cli_io.hpp"

int main(int argc, char** argv) {
    return robroc::io::cli_main(argc, argv, std::cout, std::cerr);
}
