#include <iostream>

#include "tubtilt/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tubtilt::cli::run(args, std::cout, std::cerr);
}
