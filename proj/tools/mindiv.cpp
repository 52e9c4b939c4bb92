#include <iostream>

#include "mindiv/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mindiv::run_cli(args, std::cout, std::cerr);
}
