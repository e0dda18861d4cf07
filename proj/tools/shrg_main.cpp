#include <iostream>

#include "shrg/cli.hpp"

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return shrg::cli::run(args, std::cout, std::cerr);
}
