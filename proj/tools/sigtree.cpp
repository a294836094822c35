#include <iostream>

#include "sigtree/cli.hpp"

int main(int argc, char** argv) {
    return sigtree::cli::run({argv + 1, argv + argc}, std::cin, std::cout, std::cerr);
}
